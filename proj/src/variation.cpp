#include "metamorph/variation.hpp"

#include <cmath>
#include <exception>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"

namespace metamorph {

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::forecast: return "forecast";
        case Metric::loss: return "loss";
        case Metric::train_loss: return "train_loss";
    }
    return "?";
}

double RunSample::value(Metric metric) const noexcept {
    switch (metric) {
        case Metric::forecast: return first_forecast;
        case Metric::loss: return validation_loss;
        case Metric::train_loss: return train_loss;
    }
    return 0.0;
}

VariationBaseline summarize(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw TooFewRuns("a baseline needs at least 2 runs, got " + std::to_string(n));
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double dof = faults::active(faults::FaultId::baseline_sd_population)
                           ? static_cast<double>(n)
                           : static_cast<double>(n - 1);
    VariationBaseline b;
    b.n_runs = n;
    b.mean = mean;
    b.sd = std::sqrt(ss / dof);
    b.se = b.sd / std::sqrt(static_cast<double>(n));
    b.ci_low = mean - kZ95 * b.se;
    b.ci_high = mean + kZ95 * b.se;
    return b;
}

VariationBaseline summarize(std::span<const RunSample> samples, Metric metric) {
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        values.push_back(s.value(metric));
    }
    return summarize(values);
}

bool within_ci(const VariationBaseline& baseline, double observed) noexcept {
    return baseline.ci_low <= observed && observed <= baseline.ci_high;
}

namespace {

RunSample one_run(const TimeSeries& train, const TimeSeries& val, TrainConfig config,
                  std::size_t i) {
    config.seed += i;
    const auto model = metamorph::train(train, config);
    const auto eval = evaluate(model, val);
    return RunSample{i, config.seed, eval.first_forecast.front(), eval.validation_loss,
                     model.final_train_loss};
}

void require_runs(std::size_t n_runs) {
    if (n_runs < 2) {
        throw TooFewRuns("n_runs must be at least 2, got " + std::to_string(n_runs));
    }
}

}  // namespace

std::vector<RunSample> collect_runs_serial(const TimeSeries& train, const TimeSeries& val,
                                           const TrainConfig& config, std::size_t n_runs) {
    require_runs(n_runs);
    std::vector<RunSample> out;
    out.reserve(n_runs);
    for (std::size_t i = 0; i < n_runs; ++i) {
        out.push_back(one_run(train, val, config, i));
    }
    return out;
}

std::vector<RunSample> collect_runs(const TimeSeries& train, const TimeSeries& val,
                                    const TrainConfig& config, std::size_t n_runs) {
    require_runs(n_runs);
    std::vector<RunSample> out(n_runs);
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(n_runs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                one_run(train, val, config, static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(metamorph_collect_runs)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

const VariationBaseline& BaselineSet::of(Metric metric) const noexcept {
    switch (metric) {
        case Metric::forecast: return forecast;
        case Metric::loss: return loss;
        case Metric::train_loss: return train_loss;
    }
    return forecast;
}

BaselineSet make_baseline(std::vector<RunSample> samples, const TrainConfig& config) {
    BaselineSet set;
    set.config = config;
    set.n_runs = samples.size();
    set.forecast = summarize(samples, Metric::forecast);
    set.loss = summarize(samples, Metric::loss);
    set.train_loss = summarize(samples, Metric::train_loss);
    set.samples = std::move(samples);
    return set;
}

BaselineSet compute_baseline(const TimeSeries& train, const TimeSeries& val,
                             const TrainConfig& config, std::size_t n_runs) {
    return make_baseline(collect_runs(train, val, config, n_runs), config);
}

}  // namespace metamorph
