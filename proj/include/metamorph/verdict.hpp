#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace metamorph {

enum class Status { pass, warn, fail };

std::string_view to_string(Status status);

/// Outcome of one metamorphic relation.
struct MrVerdict {
    std::string mr_id;
    Status status = Status::pass;
    std::map<std::string, double> observed;  ///< ordered, so reports are stable
    std::string expected;                    ///< the relation that was checked
    double tolerance = 0.0;
    std::vector<std::string> details;

    bool failed() const noexcept { return status == Status::fail; }

    /// Raises the status to `s` if `s` is more severe (fail > warn > pass).
    void escalate(Status s, std::string message);
};

/// Combines sub-case verdicts into one: worst status wins, observed values
/// are prefixed with the sub-case label.
MrVerdict merge_verdicts(std::string mr_id, std::string expected,
                         const std::vector<std::pair<std::string, MrVerdict>>& parts);

struct VerdictCounts {
    int pass = 0;
    int warn = 0;
    int fail = 0;
};

VerdictCounts count(const std::vector<MrVerdict>& verdicts);

}  // namespace metamorph
