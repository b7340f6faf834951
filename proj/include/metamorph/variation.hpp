#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/forecaster.hpp"
#include "metamorph/series.hpp"

namespace metamorph {

inline constexpr double kZ95 = 1.96;

enum class Metric { forecast, loss, train_loss };

std::string_view to_string(Metric metric);

/// One training run of the baseline study.
struct RunSample {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double first_forecast = 0.0;  ///< first horizon step, original units
    double validation_loss = 0.0;
    double train_loss = 0.0;

    double value(Metric metric) const noexcept;

    friend bool operator==(const RunSample&, const RunSample&) = default;
};

/// Mean, sample standard deviation, standard error and 95% interval.
struct VariationBaseline {
    std::size_t n_runs = 0;
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    friend bool operator==(const VariationBaseline&, const VariationBaseline&) = default;
};

/// Throws TooFewRuns for fewer than two values.
VariationBaseline summarize(std::span<const double> values);
VariationBaseline summarize(std::span<const RunSample> samples, Metric metric);

/// Inclusive: low <= observed <= high.
bool within_ci(const VariationBaseline& baseline, double observed) noexcept;

/// Trains and evaluates n_runs models, run i seeded with config.seed + i.
/// Runs are distributed over OpenMP threads; results do not depend on the
/// thread count. Throws TooFewRuns when n_runs < 2.
std::vector<RunSample> collect_runs(const TimeSeries& train, const TimeSeries& val,
                                    const TrainConfig& config, std::size_t n_runs);

/// Same runs, one after another. Reference for the parallel version.
std::vector<RunSample> collect_runs_serial(const TimeSeries& train, const TimeSeries& val,
                                           const TrainConfig& config, std::size_t n_runs);

/// Samples plus the per-metric summaries for a given training setup.
struct BaselineSet {
    TrainConfig config;  ///< config.seed is the base seed
    std::size_t n_runs = 0;
    std::vector<RunSample> samples;
    VariationBaseline forecast;
    VariationBaseline loss;
    VariationBaseline train_loss;

    const VariationBaseline& of(Metric metric) const noexcept;

    friend bool operator==(const BaselineSet&, const BaselineSet&) = default;
};

BaselineSet make_baseline(std::vector<RunSample> samples, const TrainConfig& config);
BaselineSet compute_baseline(const TimeSeries& train, const TimeSeries& val,
                             const TrainConfig& config, std::size_t n_runs);

}  // namespace metamorph
