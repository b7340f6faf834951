#include "metamorph/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "metamorph/error.hpp"

namespace metamorph {

void HarnessConfig::set_seed(std::uint64_t seed) noexcept {
    mr.seed = seed;
    mr.train.seed = seed;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw MalformedConfig("'" + std::string(key) + "': not a valid number: '" +
                              std::string(value) + "'");
    }
    return out;
}

std::optional<std::uint64_t> parse_seed(std::string_view text) {
    std::uint64_t out = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc() || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return out;
}

}  // namespace

HarnessConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    HarnessConfig c;
    auto path = [&](std::string_view v) {
        std::filesystem::path p{std::string(v)};
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    using Setter = std::function<void(std::string_view, std::string_view)>;
    auto size = [](std::size_t& field) -> Setter {
        return [&field](auto k, auto v) { field = parse_number<std::size_t>(k, v); };
    };
    auto real = [](double& field) -> Setter {
        return [&field](auto k, auto v) { field = parse_number<double>(k, v); };
    };
    const std::map<std::string, Setter, std::less<>> setters{
        {"timestamp_column", [&](auto, auto v) { c.csv.timestamp_column = std::string(v); }},
        {"target_column", [&](auto, auto v) { c.csv.target_column = std::string(v); }},
        {"time_steps", size(c.mr.train.time_steps)},
        {"horizon", size(c.mr.train.horizon)},
        {"batch_size", size(c.mr.train.batch_size)},
        {"hidden_size", size(c.mr.train.hidden_size)},
        {"epochs", size(c.mr.train.epochs)},
        {"learning_rate", real(c.mr.train.learning_rate)},
        {"clip_norm", real(c.mr.train.clip_norm)},
        {"seed", [&](auto k, auto v) { c.set_seed(parse_number<std::uint64_t>(k, v)); }},
        {"runs", size(c.mr.n_runs)},
        {"spread_tolerance", real(c.mr.spread_tolerance)},
        {"adversarial_steps", size(c.mr.search.steps)},
        {"adversarial_samples", size(c.mr.adversarial_samples)},
        {"adversarial_learning_rate", real(c.mr.search.learning_rate)},
        {"data_csv", [&](auto, auto v) { c.data_csv = path(v); }},
        {"train_csv", [&](auto, auto v) { c.train_csv = path(v); }},
        {"val_csv", [&](auto, auto v) { c.val_csv = path(v); }},
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw MalformedConfig("line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw MalformedConfig("line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
        }
        if (value.empty()) {
            throw MalformedConfig("line " + std::to_string(line_no) + ": empty value for '" +
                                  std::string(key) + "'");
        }
        it->second(key, value);
    }
    try {
        c.mr.train.validate();
    } catch (const Error& e) {
        throw MalformedConfig(e.what());
    }
    if (c.mr.n_runs < 2) {
        throw MalformedConfig("runs must be at least 2");
    }
    return c;
}

HarnessConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedConfig("cannot open config '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("METAMORPH_SEED");
    if (raw == nullptr) {
        return std::nullopt;
    }
    if (auto seed = parse_seed(trim(raw))) {
        return seed;
    }
    throw MalformedConfig(std::string("METAMORPH_SEED is not an unsigned integer: '") + raw + "'");
}

}  // namespace metamorph
