#include "metamorph/verdict.hpp"

#include <algorithm>

namespace metamorph {

std::string_view to_string(Status status) {
    switch (status) {
        case Status::pass: return "pass";
        case Status::warn: return "warn";
        case Status::fail: return "fail";
    }
    return "fail";
}

void MrVerdict::escalate(Status s, std::string message) {
    if (static_cast<int>(s) > static_cast<int>(status)) {
        status = s;
    }
    if (!message.empty()) {
        details.push_back(std::move(message));
    }
}

MrVerdict merge_verdicts(std::string mr_id, std::string expected,
                         const std::vector<std::pair<std::string, MrVerdict>>& parts) {
    MrVerdict out;
    out.mr_id = std::move(mr_id);
    out.expected = std::move(expected);
    for (const auto& [label, part] : parts) {
        if (static_cast<int>(part.status) > static_cast<int>(out.status)) {
            out.status = part.status;
        }
        out.tolerance = std::max(out.tolerance, part.tolerance);
        for (const auto& [key, value] : part.observed) {
            out.observed[label + "." + key] = value;
        }
        for (const auto& d : part.details) {
            out.details.push_back(label + ": " + d);
        }
    }
    return out;
}

VerdictCounts count(const std::vector<MrVerdict>& verdicts) {
    VerdictCounts c;
    for (const auto& v : verdicts) {
        switch (v.status) {
            case Status::pass: ++c.pass; break;
            case Status::warn: ++c.warn; break;
            case Status::fail: ++c.fail; break;
        }
    }
    return c;
}

}  // namespace metamorph
