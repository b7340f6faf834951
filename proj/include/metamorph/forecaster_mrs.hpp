#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metamorph/adversarial.hpp"
#include "metamorph/forecaster.hpp"
#include "metamorph/series.hpp"
#include "metamorph/spectral.hpp"
#include "metamorph/variation.hpp"
#include "metamorph/verdict.hpp"

namespace metamorph::fmr {

enum class ScaleMode { add, multiply };

std::string_view to_string(ScaleMode mode);

struct ScalingCase {
    ScaleMode mode;
    double k;
};

/// Knobs shared by the forecaster relations.
struct MrConfig {
    TrainConfig train;                 ///< train.seed is the base seed
    std::size_t n_runs = 30;           ///< follow-up runs per retraining relation
    std::vector<ScalingCase> fmr1_cases{{ScaleMode::add, 309.0},
                                        {ScaleMode::add, -50.0},
                                        {ScaleMode::multiply, 2.0},
                                        {ScaleMode::multiply, 0.5}};
    double spread_tolerance = 1e-3;    ///< relative, follow-up se vs |k| * baseline se
    double change_tolerance = 1e-9;    ///< relative, FMR-2 "forecast moved"
    double fmr2_multiplier = 5.0;
    double invariance_tolerance = 1e-9;
    adversarial::SearchConfig search;
    std::size_t adversarial_samples = 20;
    std::uint64_t seed = 0;            ///< row shuffles and other relation randomness
};

// Retraining relations compare the mean of n_runs follow-up runs, seeded like
// the baseline runs, against the baseline confidence intervals.

/// Retrains on (train o k, val o k). Passes when the follow-up loss means lie
/// in the baseline loss intervals, the shifted-back forecast mean lies in the
/// forecast interval, and the forecast spread scales by |k| (add: 1).
MrVerdict fmr1_linear_scaling(const TimeSeries& train, const TimeSeries& val,
                              const MrConfig& config, const BaselineSet& baseline,
                              ScalingCase scaling);
MrVerdict fmr1_suite(const TimeSeries& train, const TimeSeries& val, const MrConfig& config,
                     const BaselineSet& baseline);

/// Fixed model, validation data shifted (k = 3 max(train)) and scaled. The
/// shifted-back forecast must differ from the original one.
MrVerdict fmr2_validation_only_scaling(const TrainedModel& model, const TimeSeries& train,
                                       const TimeSeries& val, const MrConfig& config);

/// Training lengths t+h, t+h-1, b+t+h-2, b+t+h-1: trains on 1 window,
/// refuses cleanly, trains on b-1 and b windows.
MrVerdict fmr3_train_boundaries(const TimeSeries& train, const MrConfig& config);

/// Same lengths for evaluate on a fixed model.
MrVerdict fmr4_validation_boundaries(const TrainedModel& model, const TimeSeries& val,
                                     const MrConfig& config);

/// Training rows shuffled then reloaded: follow-up means within the baseline
/// intervals. Validation rows shuffled: evaluation bit-identical.
MrVerdict fmr5_shuffle(const TrainedModel& model, const TimeSeries& train,
                       const TimeSeries& val, const MrConfig& config,
                       const BaselineSet& baseline);

/// Constant training series (7 and 0) must raise ZeroRange.
MrVerdict fmr6_zero_range_train(const MrConfig& config);

/// Constant validation series (train mean, 10 x train max) evaluate finitely.
MrVerdict fmr7_zero_range_validation(const TrainedModel& model, const TimeSeries& train,
                                     const TimeSeries& val);

struct TimestepOutcome {
    spectral::TimestepLossCurve curve;
    MrVerdict verdict;
};

/// Reconstruction-loss curve over window lengths. Warns when the configured
/// length is below the elbow; fails on negative or non-finite losses or if
/// the curve changes when a constant is added to the series.
TimestepOutcome fmr8_timestep_analysis(const TimeSeries& val, std::size_t configured_time_steps,
                                       const MrConfig& config);

struct AdversarialOutcome {
    std::vector<adversarial::AdversarialResult> results;
    std::size_t skipped_negative = 0;
    MrVerdict verdict;
};

/// Searches from up to config.adversarial_samples evenly spaced validation
/// windows. Warns when more than half succeed; fails when a search does not
/// lower its loss or produces non-finite values.
AdversarialOutcome fmr9_adversarial(const TrainedModel& model, const TimeSeries& val,
                                    const MrConfig& config);

/// Evenly spaced normalized validation windows with no negative entries.
std::vector<std::vector<double>> adversarial_windows(const TrainedModel& model,
                                                     const TimeSeries& val, std::size_t samples,
                                                     std::size_t* skipped_negative = nullptr);

struct SuiteResult {
    std::vector<MrVerdict> verdicts;  ///< FMR-1 .. FMR-9
    std::optional<spectral::TimestepLossCurve> curve;
    std::vector<adversarial::AdversarialResult> adversarial;
};

/// Trains the reference model (base seed) and runs all nine relations.
/// Exceptions from a relation become a fail verdict for that relation.
SuiteResult run_suite(const TimeSeries& train, const TimeSeries& val, const MrConfig& config,
                      const BaselineSet& baseline);

}  // namespace metamorph::fmr
