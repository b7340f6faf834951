#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "metamorph/adversarial.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/forecaster.hpp"
#include "metamorph/kill_matrix.hpp"
#include "metamorph/spectral.hpp"
#include "metamorph/variation.hpp"
#include "metamorph/verdict.hpp"

namespace metamorph::report {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const MrVerdict& v);
json to_json(const TrainConfig& c);
json to_json(const VariationBaseline& b);
json to_json(const RunSample& s);
json to_json(const BaselineSet& b);
json to_json(const spectral::TimestepLossCurve& c);
json to_json(const adversarial::AdversarialResult& r);
json to_json(const faults::FaultSpec& f);
json to_json(const kill::KillMatrix& m);

/// Throw MalformedReport on missing or mistyped fields.
TrainConfig train_config_from_json(const json& j);
BaselineSet baseline_from_json(const json& j);

/// Top-level report: verdicts, inputs echo, baselines and summary counts.
struct RunReport {
    std::string suite;
    std::vector<MrVerdict> verdicts;
    json environment = json::object();  ///< seed, config echo, input paths
    json data = json::object();         ///< suite-specific payload
    double timing_seconds = 0.0;
};

json to_json(const RunReport& r);

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const json& j);

/// Copy without the "timing" member, for determinism comparisons.
json without_timing(json j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Baseline file as written by the baseline subcommand: either a bare
/// baseline object or a report whose data holds one under "baseline".
BaselineSet load_baseline(const std::filesystem::path& path);

/// "time_steps,loss" rows.
std::string curve_csv(const spectral::TimestepLossCurve& c);

}  // namespace metamorph::report
