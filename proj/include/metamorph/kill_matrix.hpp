#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metamorph/faults.hpp"
#include "metamorph/forecaster_mrs.hpp"
#include "metamorph/series.hpp"
#include "metamorph/variation.hpp"
#include "metamorph/verdict.hpp"

namespace metamorph::kill {

enum class Cell { killed, survived, not_applicable };

std::string_view to_string(Cell cell);

/// CMR-1..CMR-10 then FMR-1..FMR-9.
const std::vector<std::string>& mr_ids();

/// Inputs for one seeded run of both suites.
struct SuiteCase {
    std::uint64_t seed = 0;
    FeatureTable table;
    TimeSeries train;
    TimeSeries val;
};

/// Synthetic cases for seeds seed, seed+1, ...
std::vector<SuiteCase> synthetic_cases(std::uint64_t seed, std::size_t count);

/// Results of both suites on one case.
struct SuiteRun {
    std::vector<MrVerdict> correlation;
    std::vector<MrVerdict> forecaster;
    BaselineSet baseline;
};

struct FaultRow {
    const faults::FaultSpec* spec = nullptr;
    std::map<std::string, Cell> cells;
    std::vector<std::string> killers;
    std::vector<std::string> missed_expected;  ///< documented killers that did not fail
    bool killed = false;
    bool output_changed = false;  ///< any verdict or observed value differs from the clean run
};

struct KillMatrix {
    std::uint64_t seed = 0;
    std::size_t gate_cases = 0;
    std::vector<SuiteRun> clean;  ///< clean-build gate, one per case
    std::vector<FaultRow> rows;
    std::size_t killed = 0;
    double kill_rate = 0.0;
};

struct MatrixConfig {
    fmr::MrConfig mr;  ///< mr.train.seed is replaced by each case's seed
};

using Progress = std::function<void(const std::string&)>;

/// Runs one half (or both when `half` is empty) on a case with the
/// currently active fault. When `baseline` is null it is computed first.
SuiteRun run_suites(const SuiteCase& c, const MatrixConfig& config, const BaselineSet* baseline,
                    std::optional<faults::Half> half = std::nullopt);

/// Clean gate on every case, then one row per fault, each run on cases[0]
/// with the clean baseline. Throws CleanBuildFails if any relation fails
/// without a fault, and std::logic_error if a fault is already active.
KillMatrix run_kill_matrix(std::span<const faults::FaultSpec> fault_list,
                           const std::vector<SuiteCase>& cases, const MatrixConfig& config,
                           const Progress& progress = {});

std::string to_csv(const KillMatrix& matrix);

}  // namespace metamorph::kill
