#include "metamorph/forecaster_mrs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>

#include "metamorph/error.hpp"
#include "metamorph/rng.hpp"

namespace metamorph::fmr {

std::string_view to_string(ScaleMode mode) {
    return mode == ScaleMode::add ? "add" : "multiply";
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

MrVerdict make(std::string id, std::string expected, double tol) {
    MrVerdict v;
    v.mr_id = std::move(id);
    v.expected = std::move(expected);
    v.tolerance = tol;
    return v;
}

double mean_of(const std::vector<RunSample>& samples, Metric metric) {
    double s = 0.0;
    for (const auto& r : samples) {
        s += r.value(metric);
    }
    return s / static_cast<double>(samples.size());
}

void require_matching(const MrConfig& config, const BaselineSet& baseline) {
    if (!(baseline.config == config.train)) {
        throw MalformedConfig("baseline was computed with a different training config");
    }
}

void gate(MrVerdict& v, const std::string& label, const VariationBaseline& ci, double observed) {
    v.observed[label] = observed;
    if (!within_ci(ci, observed)) {
        v.escalate(Status::fail, label + " = " + fmt(observed) + " outside baseline CI [" +
                                     fmt(ci.ci_low) + ", " + fmt(ci.ci_high) + "]");
    }
}

// Follow-up runs seeded like the baseline; mean metrics gated by its CIs.
std::vector<RunSample> gate_follow_up(MrVerdict& v, const TimeSeries& train, const TimeSeries& val,
                                      const BaselineSet& baseline,
                                      const std::function<double(double)>& back) {
    auto runs = collect_runs(train, val, baseline.config, baseline.n_runs);
    gate(v, "val_loss_mean", baseline.loss, mean_of(runs, Metric::loss));
    gate(v, "train_loss_mean", baseline.train_loss, mean_of(runs, Metric::train_loss));
    gate(v, "forecast_mean_shifted_back", baseline.forecast, back(mean_of(runs, Metric::forecast)));
    return runs;
}

TimeSeries map_values(const TimeSeries& s, const std::function<double(double)>& f) {
    std::vector<double> values(s.values().begin(), s.values().end());
    for (double& x : values) {
        x = f(x);
    }
    return TimeSeries({s.timestamps().begin(), s.timestamps().end()}, std::move(values));
}

TimeSeries constant_like(const TimeSeries& s, double value) {
    return map_values(s, [value](double) { return value; });
}

TimeSeries shuffled_rows(const TimeSeries& s, std::uint64_t seed) {
    auto rows = s.rows();
    Rng rng(seed);
    rng.shuffle(std::span(rows));
    return TimeSeries::from_rows(std::move(rows));
}

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ------------------------------------------------------------------- FMR-1

MrVerdict fmr1_linear_scaling(const TimeSeries& train, const TimeSeries& val,
                              const MrConfig& config, const BaselineSet& baseline,
                              ScalingCase scaling) {
    require_matching(config, baseline);
    const double k = scaling.k;
    auto v = make("FMR-1", "", config.spread_tolerance);
    std::function<double(double)> forward;
    std::function<double(double)> back;
    double spread_factor = 1.0;
    if (scaling.mode == ScaleMode::add) {
        forward = [k](double x) { return x + k; };
        back = [k](double f) { return f - k; };
        v.expected = "retrained on data + k: losses in CI, forecast - k in CI, spread unchanged";
    } else {
        if (k == 0.0) {
            throw ShapeMismatch("multiplicative scaling needs k != 0");
        }
        forward = [k](double x) { return x * k; };
        back = [k](double f) { return f / k; };
        spread_factor = std::abs(k);
        v.expected = "retrained on data * k: losses in CI, forecast / k in CI, spread scaled by |k|";
    }
    v.observed["k"] = k;

    const auto runs = gate_follow_up(v, map_values(train, forward), map_values(val, forward),
                                     baseline, back);
    const auto follow = summarize(runs, Metric::forecast);
    const double expected_se = spread_factor * baseline.forecast.se;
    v.observed["forecast_se"] = follow.se;
    v.observed["expected_se"] = expected_se;
    if (expected_se > 0.0) {
        const double rel = std::abs(follow.se - expected_se) / expected_se;
        v.observed["spread_rel_error"] = rel;
        if (rel > config.spread_tolerance) {
            v.escalate(Status::fail, "forecast se " + fmt(follow.se) + " vs expected " +
                                         fmt(expected_se));
        }
    }
    return v;
}

MrVerdict fmr1_suite(const TimeSeries& train, const TimeSeries& val, const MrConfig& config,
                     const BaselineSet& baseline) {
    std::vector<std::pair<std::string, MrVerdict>> parts;
    for (const auto& c : config.fmr1_cases) {
        std::string label = std::string(to_string(c.mode)) + "(" + fmt(c.k) + ")";
        parts.emplace_back(std::move(label), fmr1_linear_scaling(train, val, config, baseline, c));
    }
    return merge_verdicts("FMR-1", "linear scaling of train and validation data", parts);
}

// ------------------------------------------------------------------- FMR-2

MrVerdict fmr2_validation_only_scaling(const TrainedModel& model, const TimeSeries& train,
                                       const TimeSeries& val, const MrConfig& config) {
    auto v = make("FMR-2", "fixed model, scaled validation data: shifted-back forecast changes",
                  config.change_tolerance);
    const auto base = evaluate(model, val);
    const double train_max = *std::max_element(train.values().begin(), train.values().end());
    const double shift = 3.0 * train_max;
    const double mult = config.fmr2_multiplier;

    auto check = [&](const std::string& label, const TimeSeries& follow,
                     const std::function<double(double)>& back) {
        const auto res = evaluate(model, follow);
        double max_rel = 0.0;
        for (std::size_t i = 0; i < base.first_forecast.size(); ++i) {
            const double b = base.first_forecast[i];
            const double d = std::abs(back(res.first_forecast[i]) - b);
            max_rel = std::max(max_rel, d / std::max(1.0, std::abs(b)));
        }
        v.observed[label + ".max_rel_change"] = max_rel;
        if (!(max_rel > config.change_tolerance)) {
            v.escalate(Status::fail, label + ": forecast unchanged after scaling validation data "
                                             "only (normalizer fitted on validation data?)");
        }
    };
    v.observed["shift"] = shift;
    check("add", map_values(val, [shift](double x) { return x + shift; }),
          [shift](double f) { return f - shift; });
    check("multiply", map_values(val, [mult](double x) { return x * mult; }),
          [mult](double f) { return f / mult; });
    return v;
}

// ---------------------------------------------------------------- FMR-3/4

namespace {

struct BoundaryCase {
    std::string label;
    std::size_t length;
    std::size_t expected;  // 0: must be refused
};

std::vector<BoundaryCase> boundary_cases(const TrainConfig& c) {
    const std::size_t th = c.time_steps + c.horizon;
    const std::size_t b = c.batch_size;
    return {{"case1", th, 1},
            {"case2", th - 1, 0},
            {"case3", b + th - 2, b - 1},
            {"case4", b + th - 1, b}};
}

template <class Run>
void run_boundaries(MrVerdict& v, const TrainConfig& cfg, std::size_t available, Run run) {
    for (const auto& c : boundary_cases(cfg)) {
        if (c.length > available) {
            v.escalate(Status::warn, c.label + ": series too short to build this case");
            continue;
        }
        try {
            const auto [count, finite] = run(c.length);
            v.observed[c.label + ".windows"] = static_cast<double>(count);
            if (c.expected == 0) {
                v.escalate(Status::fail, c.label + ": length " + std::to_string(c.length) +
                                             " was accepted (" + std::to_string(count) +
                                             " windows)");
            } else if (count != c.expected) {
                v.escalate(Status::fail, c.label + ": " + std::to_string(count) +
                                             " windows, expected " + std::to_string(c.expected));
            } else if (!finite) {
                v.escalate(Status::fail, c.label + ": non-finite loss");
            }
        } catch (const InsufficientData& e) {
            v.observed[c.label + ".windows"] = 0.0;
            if (c.expected != 0) {
                v.escalate(Status::fail, c.label + ": refused: " + e.what());
            }
        }
    }
}

}  // namespace

MrVerdict fmr3_train_boundaries(const TimeSeries& train, const MrConfig& config) {
    auto v = make("FMR-3", "training lengths t+h, t+h-1, b+t+h-2, b+t+h-1 give 1, error, b-1, b windows", 0.0);
    const auto& cfg = config.train;
    run_boundaries(v, cfg, train.size(), [&](std::size_t len) {
        const auto m = metamorph::train(train.head(len), cfg);
        return std::pair{m.n_sequences, std::isfinite(m.final_train_loss) && m.params.all_finite()};
    });
    return v;
}

MrVerdict fmr4_validation_boundaries(const TrainedModel& model, const TimeSeries& val,
                                     const MrConfig& config) {
    (void)config;
    auto v = make("FMR-4", "validation lengths t+h, t+h-1, b+t+h-2, b+t+h-1 give 1, no forecast, b-1, b windows", 0.0);
    run_boundaries(v, model.config, val.size(), [&](std::size_t len) {
        const auto r = evaluate(model, val.head(len));
        return std::pair{r.n_windows,
                         std::isfinite(r.validation_loss) && all_finite(r.first_forecast)};
    });
    return v;
}

// ------------------------------------------------------------------- FMR-5

MrVerdict fmr5_shuffle(const TrainedModel& model, const TimeSeries& train, const TimeSeries& val,
                       const MrConfig& config, const BaselineSet& baseline) {
    require_matching(config, baseline);
    auto v = make("FMR-5", "shuffled training rows: means in CI; shuffled validation rows: identical evaluation", 0.0);

    const auto train_shuffled = shuffled_rows(train, derive_seed(config.seed, 5));
    gate_follow_up(v, train_shuffled, val, baseline, [](double f) { return f; });

    const auto val_shuffled = shuffled_rows(val, derive_seed(config.seed, 6));
    const auto a = evaluate(model, val);
    const auto b = evaluate(model, val_shuffled);
    v.observed["validation_identical"] = a == b ? 1.0 : 0.0;
    if (!(a == b)) {
        v.escalate(Status::fail, "evaluation changed after shuffling validation rows: loss " +
                                     fmt(a.validation_loss) + " -> " + fmt(b.validation_loss));
    }
    return v;
}

// ---------------------------------------------------------------- FMR-6/7

MrVerdict fmr6_zero_range_train(const MrConfig& config) {
    auto v = make("FMR-6", "constant training series raises ZeroRange", 0.0);
    const auto& cfg = config.train;
    const std::size_t len = cfg.batch_size + cfg.time_steps + cfg.horizon;
    for (double level : {7.0, 0.0}) {
        const std::string label = "constant_" + fmt(level);
        const auto series = TimeSeries::from_values(std::vector<double>(len, level));
        try {
            const auto m = metamorph::train(series, cfg);
            v.observed[label + ".train_loss"] = m.final_train_loss;
            v.escalate(Status::fail, label + ": trained without a ZeroRange error (loss " +
                                         fmt(m.final_train_loss) + ")");
        } catch (const ZeroRange&) {
            v.observed[label + ".zero_range_raised"] = 1.0;
        } catch (const Error& e) {
            v.escalate(Status::fail, label + ": raised " + e.what() + " instead of ZeroRange");
        }
    }
    return v;
}

MrVerdict fmr7_zero_range_validation(const TrainedModel& model, const TimeSeries& train,
                                     const TimeSeries& val) {
    auto v = make("FMR-7", "constant validation series evaluates with a finite loss", 0.0);
    const auto tv = train.values();
    const double mean = std::accumulate(tv.begin(), tv.end(), 0.0) / static_cast<double>(tv.size());
    const double max = *std::max_element(tv.begin(), tv.end());
    for (const auto& [label, level] : {std::pair{"train_mean", mean}, std::pair{"ten_x_max", 10.0 * max}}) {
        try {
            const auto r = evaluate(model, constant_like(val, level));
            v.observed[std::string(label) + ".loss"] = r.validation_loss;
            if (!std::isfinite(r.validation_loss) || !all_finite(r.first_forecast)) {
                v.escalate(Status::fail, std::string(label) + ": non-finite evaluation");
            }
        } catch (const Error& e) {
            v.escalate(Status::fail, std::string(label) + ": evaluation raised: " + e.what());
        }
    }
    return v;
}

// ------------------------------------------------------------------- FMR-8

TimestepOutcome fmr8_timestep_analysis(const TimeSeries& val, std::size_t configured_time_steps,
                                       const MrConfig& config) {
    auto v = make("FMR-8", "configured TIME_STEPS at or above the reconstruction-loss elbow",
                  config.invariance_tolerance);
    auto curve = spectral::timestep_curve(val.values());

    const bool valid = std::all_of(curve.loss.begin(), curve.loss.end(),
                                   [](double l) { return std::isfinite(l) && l >= 0.0; });
    if (!valid) {
        v.escalate(Status::fail, "negative or non-finite reconstruction loss");
    }

    double max_abs = 0.0;
    for (double x : val.values()) {
        max_abs = std::max(max_abs, std::abs(x));
    }
    const double shift = 10.0 * (max_abs + 1.0);
    const auto shifted = spectral::reconstruction_losses(
        map_values(val, [shift](double x) { return x + shift; }).values());
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.loss.size(); ++i) {
        worst = std::max(worst, std::abs(shifted[i] - curve.loss[i]) /
                                    std::max(1.0, std::abs(curve.loss[i])));
    }
    v.observed["shift_invariance_error"] = worst;
    if (!(worst <= config.invariance_tolerance)) {
        v.escalate(Status::fail, "curve changed when a constant was added to the series");
    }

    v.observed["elbow"] = static_cast<double>(curve.elbow);
    v.observed["configured_time_steps"] = static_cast<double>(configured_time_steps);
    if (configured_time_steps < curve.elbow) {
        v.escalate(Status::warn, "TIME_STEPS " + std::to_string(configured_time_steps) +
                                     " is below the elbow at " + std::to_string(curve.elbow));
    }
    return {std::move(curve), std::move(v)};
}

// ------------------------------------------------------------------- FMR-9

std::vector<std::vector<double>> adversarial_windows(const TrainedModel& model,
                                                     const TimeSeries& val, std::size_t samples,
                                                     std::size_t* skipped_negative) {
    const auto data = make_sequences(model.normalizer.normalize(val.values()),
                                     model.config.time_steps, model.config.horizon);
    std::vector<std::vector<double>> eligible;
    std::size_t skipped = 0;
    for (const auto& w : data.inputs) {
        if (std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; })) {
            eligible.push_back(w);
        } else {
            ++skipped;
        }
    }
    if (skipped_negative) {
        *skipped_negative = skipped;
    }
    if (samples == 0 || eligible.size() <= samples) {
        return eligible;
    }
    std::vector<std::vector<double>> picked;
    picked.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        picked.push_back(eligible[i * eligible.size() / samples]);
    }
    return picked;
}

AdversarialOutcome fmr9_adversarial(const TrainedModel& model, const TimeSeries& val,
                                    const MrConfig& config) {
    AdversarialOutcome out;
    out.verdict = make("FMR-9", "few inputs near X_s have a forecast twice h(X_s); search lowers its loss", 0.5);
    auto& v = out.verdict;
    const auto windows = adversarial_windows(model, val, config.adversarial_samples,
                                             &out.skipped_negative);
    v.observed["windows"] = static_cast<double>(windows.size());
    v.observed["skipped_negative"] = static_cast<double>(out.skipped_negative);
    if (windows.empty()) {
        v.escalate(Status::warn, "no non-negative validation window to search from");
        return out;
    }
    out.results = adversarial::search_all(model.params, windows, config.search);

    std::size_t not_lowered = 0;
    std::size_t non_finite = 0;
    for (const auto& r : out.results) {
        if (!all_finite(r.loss_trace) || !all_finite(r.perturbed)) {
            ++non_finite;
        } else if (config.search.steps > 0 && r.initial_loss() > 0.0 &&
                   !(r.final_loss() < r.initial_loss())) {
            ++not_lowered;
        }
    }
    const double fraction = adversarial::success_fraction(out.results);
    v.observed["success_fraction"] = fraction;
    v.observed["not_lowered"] = static_cast<double>(not_lowered);
    v.observed["non_finite"] = static_cast<double>(non_finite);
    if (non_finite > 0) {
        v.escalate(Status::fail, std::to_string(non_finite) + " searches produced non-finite values");
    }
    if (not_lowered > 0) {
        v.escalate(Status::fail, std::to_string(not_lowered) + " searches ended above their initial loss");
    }
    if (fraction > 0.5) {
        v.escalate(Status::warn, "trained model is not robust: " + fmt(fraction) +
                                     " of searches found an adversarial input");
    }
    return out;
}

// ------------------------------------------------------------------- suite

SuiteResult run_suite(const TimeSeries& train, const TimeSeries& val, const MrConfig& config,
                      const BaselineSet& baseline) {
    require_matching(config, baseline);
    SuiteResult out;

    std::optional<TrainedModel> model;
    std::string model_error;
    try {
        model = metamorph::train(train, config.train);
    } catch (const std::exception& e) {
        model_error = e.what();
    }

    auto guarded = [&](const char* id, bool needs_model, const std::function<MrVerdict()>& f) {
        if (needs_model && !model) {
            MrVerdict v;
            v.mr_id = id;
            v.escalate(Status::fail, "reference model failed to train: " + model_error);
            out.verdicts.push_back(std::move(v));
            return;
        }
        try {
            out.verdicts.push_back(f());
        } catch (const std::exception& e) {
            MrVerdict v;
            v.mr_id = id;
            v.escalate(Status::fail, std::string("relation raised: ") + e.what());
            out.verdicts.push_back(std::move(v));
        }
    };

    guarded("FMR-1", false, [&] { return fmr1_suite(train, val, config, baseline); });
    guarded("FMR-2", true, [&] { return fmr2_validation_only_scaling(*model, train, val, config); });
    guarded("FMR-3", false, [&] { return fmr3_train_boundaries(train, config); });
    guarded("FMR-4", true, [&] { return fmr4_validation_boundaries(*model, val, config); });
    guarded("FMR-5", true, [&] { return fmr5_shuffle(*model, train, val, config, baseline); });
    guarded("FMR-6", false, [&] { return fmr6_zero_range_train(config); });
    guarded("FMR-7", true, [&] { return fmr7_zero_range_validation(*model, train, val); });
    guarded("FMR-8", false, [&] {
        auto r = fmr8_timestep_analysis(val, config.train.time_steps, config);
        out.curve = std::move(r.curve);
        return r.verdict;
    });
    guarded("FMR-9", true, [&] {
        auto r = fmr9_adversarial(*model, val, config);
        out.adversarial = std::move(r.results);
        return r.verdict;
    });
    return out;
}

}  // namespace metamorph::fmr
