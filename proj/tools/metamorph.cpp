// metamorph: command-line front end for the metamorphic test suites.
//
// Exit codes: 0 all relations pass or warn, 1 at least one relation fails,
// 2 usage or input error, 3 precondition failure (clean-build gate).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "metamorph/config.hpp"
#include "metamorph/correlation.hpp"
#include "metamorph/correlation_mrs.hpp"
#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/forecaster.hpp"
#include "metamorph/forecaster_mrs.hpp"
#include "metamorph/kill_matrix.hpp"
#include "metamorph/report.hpp"
#include "metamorph/spectral.hpp"
#include "metamorph/variation.hpp"

namespace {

using namespace metamorph;
using report::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::string fault;
    std::string out;
    std::string data;
    std::string train;
    std::string val;
    std::string baseline;
    std::string model;
    std::string samples;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> windows;
    std::optional<std::size_t> time_steps;
    std::size_t gate_cases = 3;
    bool matrix = false;
    bool list = false;
};

// Settings precedence: config file, then METAMORPH_SEED, then flags.
HarnessConfig resolve(const Options& o) {
    HarnessConfig c = o.config.empty() ? HarnessConfig{} : load_config(o.config);
    if (auto env = seed_from_env()) {
        c.set_seed(*env);
    }
    if (o.seed) {
        c.set_seed(*o.seed);
    }
    if (o.runs) {
        c.mr.n_runs = *o.runs;
    }
    if (o.steps) {
        c.mr.search.steps = *o.steps;
    }
    if (o.time_steps) {
        c.mr.train.time_steps = *o.time_steps;
    }
    if (!o.data.empty()) {
        c.data_csv = o.data;
    }
    if (!o.train.empty()) {
        c.train_csv = o.train;
    }
    if (!o.val.empty()) {
        c.val_csv = o.val;
    }
    return c;
}

json environment(const HarnessConfig& c, const Options& o) {
    auto path_or_synthetic = [](const std::optional<std::filesystem::path>& p) -> json {
        return p ? json(p->generic_string()) : json("synthetic");
    };
    return {{"seed", c.seed()},
            {"train_config", report::to_json(c.mr.train)},
            {"runs", c.mr.n_runs},
            {"spread_tolerance", c.mr.spread_tolerance},
            {"adversarial_steps", c.mr.search.steps},
            {"adversarial_samples", c.mr.adversarial_samples},
            {"adversarial_learning_rate", c.mr.search.learning_rate},
            {"timestamp_column", c.csv.timestamp_column},
            {"target_column", c.csv.target_column},
            {"data", path_or_synthetic(c.data_csv)},
            {"train", path_or_synthetic(c.train_csv)},
            {"val", path_or_synthetic(c.val_csv)},
            {"config", o.config},
            {"fault", o.fault.empty() ? "none" : o.fault}};
}

TimeSeries load_series(const std::filesystem::path& path, const CsvConfig& csv) {
    auto table = load_csv(path, csv);
    return table.target_series();
}

TrainValSplit load_split(const HarnessConfig& c) {
    if (c.train_csv.has_value() != c.val_csv.has_value()) {
        throw MalformedConfig("train and validation files must be given together");
    }
    if (!c.train_csv) {
        return default_split(c.seed());
    }
    return {load_series(*c.train_csv, c.csv), load_series(*c.val_csv, c.csv)};
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        report::write_text(out, text);
    }
}

int exit_for(const std::vector<MrVerdict>& verdicts) {
    return count(verdicts).fail > 0 ? kExitFail : kExitPass;
}

void print_verdicts(const std::vector<MrVerdict>& verdicts) {
    for (const auto& v : verdicts) {
        std::fprintf(stderr, "%-7s %s\n", v.mr_id.c_str(), std::string(to_string(v.status)).c_str());
        for (const auto& d : v.details) {
            std::fprintf(stderr, "        %s\n", d.c_str());
        }
    }
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::unique_ptr<faults::ScopedFault> activate(const std::string& name) {
    if (name.empty()) {
        return nullptr;
    }
    return std::make_unique<faults::ScopedFault>(faults::find_fault(name).id);
}

int finish(report::RunReport r, const Stopwatch& clock, const std::string& out) {
    r.timing_seconds = clock.seconds();
    print_verdicts(r.verdicts);
    emit(report::dump(report::to_json(r)), out);
    return exit_for(r.verdicts);
}

int cmd_corr_mrs(const Options& o) {
    Stopwatch clock;
    const auto c = resolve(o);
    const auto table = c.data_csv ? load_csv(*c.data_csv, c.csv) : default_table(c.seed());
    report::RunReport r{"corr-mrs", {}, environment(c, o)};
    {
        auto guard = activate(o.fault);
        r.verdicts = corr_mrs::run_suite(table, c.seed());
        r.data = {{"target", table.target_name()}, {"rows", table.rows()}};
        try {
            const auto ranked = corr::rank_features(table);
            json ranking = json::array();
            for (const auto& f : ranked.ranked) {
                ranking.push_back({{"feature", f.name}, {"r", f.r}, {"score", f.score}});
            }
            json undefined = json::array();
            for (const auto& u : ranked.undefined) {
                undefined.push_back({{"feature", u.name}, {"reason", u.reason}});
            }
            r.data["ranking"] = ranking;
            r.data["undefined"] = undefined;
            r.data["warnings"] = ranked.warnings;
        } catch (const Error& e) {
            r.data["ranking_error"] = e.what();
        }
    }
    return finish(std::move(r), clock, o.out);
}

std::vector<double> read_samples(const std::filesystem::path& path) {
    std::vector<double> values;
    std::istringstream in(report::read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        try {
            std::size_t used = 0;
            values.push_back(std::stod(line.substr(first), &used));
        } catch (const std::exception&) {
            throw MalformedCsv("sample file '" + path.string() + "': bad value '" + line + "'");
        }
    }
    return values;
}

int cmd_baseline(const Options& o) {
    Stopwatch clock;
    const auto c = resolve(o);
    report::RunReport r{"baseline", {}, environment(c, o)};
    if (!o.samples.empty()) {
        const auto values = read_samples(o.samples);
        r.environment["samples"] = o.samples;
        r.data = {{"values", values}, {"summary", report::to_json(summarize(values))}};
    } else {
        const auto split = load_split(c);
        auto guard = activate(o.fault);
        r.data = {{"baseline",
                   report::to_json(compute_baseline(split.train, split.val, c.mr.train, c.mr.n_runs))}};
    }
    return finish(std::move(r), clock, o.out);
}

int cmd_forecast_mrs(const Options& o) {
    Stopwatch clock;
    const auto c = resolve(o);
    const auto split = load_split(c);
    report::RunReport r{"forecast-mrs", {}, environment(c, o)};
    // The baseline is always the clean one: loaded, or computed before any
    // fault is activated.
    BaselineSet baseline = o.baseline.empty()
                               ? compute_baseline(split.train, split.val, c.mr.train, c.mr.n_runs)
                               : report::load_baseline(o.baseline);
    r.environment["baseline"] = o.baseline.empty() ? "computed" : o.baseline;
    auto guard = activate(o.fault);
    const auto suite = fmr::run_suite(split.train, split.val, c.mr, baseline);
    r.verdicts = suite.verdicts;
    json adversarial = json::array();
    for (const auto& a : suite.adversarial) {
        adversarial.push_back({{"success", a.success},
                               {"y_s", a.y_s},
                               {"y_p", a.y_p},
                               {"relative_distance", a.relative_distance},
                               {"initial_loss", a.initial_loss()},
                               {"final_loss", a.final_loss()}});
    }
    r.data = {{"baseline", report::to_json(baseline)},
              {"timestep_curve", suite.curve ? report::to_json(*suite.curve) : json(nullptr)},
              {"adversarial", adversarial}};
    return finish(std::move(r), clock, o.out);
}

int cmd_timesteps(const Options& o) {
    const auto c = resolve(o);
    const auto series = c.data_csv ? load_series(*c.data_csv, c.csv) : default_split(c.seed()).val;
    auto guard = activate(o.fault);
    const auto curve = spectral::timestep_curve(series.values());
    emit(report::curve_csv(curve), o.out);
    std::fprintf(stderr, "elbow %zu (configured time_steps %zu)\n", curve.elbow,
                 c.mr.train.time_steps);
    return kExitPass;
}

int cmd_adversarial(const Options& o) {
    Stopwatch clock;
    const auto c = resolve(o);
    if (o.model.empty()) {
        throw MalformedModel("--model is required");
    }
    const auto model = load_model(std::filesystem::path(o.model));
    const auto val = c.val_csv ? load_series(*c.val_csv, c.csv) : default_split(c.seed()).val;
    auto mr = c.mr;
    mr.train = model.config;
    if (o.windows) {
        mr.adversarial_samples = *o.windows;
    }
    report::RunReport r{"adversarial", {}, environment(c, o)};
    r.environment["model"] = o.model;
    auto guard = activate(o.fault);
    auto outcome = fmr::fmr9_adversarial(model, val, mr);
    r.verdicts = {outcome.verdict};
    json results = json::array();
    for (const auto& a : outcome.results) {
        results.push_back(report::to_json(a));
    }
    r.data = {{"steps", mr.search.steps},
              {"skipped_negative", outcome.skipped_negative},
              {"success_fraction", adversarial::success_fraction(outcome.results)},
              {"results", results}};
    return finish(std::move(r), clock, o.out);
}

int cmd_train(const Options& o) {
    const auto c = resolve(o);
    const auto series = c.train_csv ? load_series(*c.train_csv, c.csv) : default_split(c.seed()).train;
    auto guard = activate(o.fault);
    const auto model = train(series, c.mr.train);
    emit(save_model(model), o.out);
    std::fprintf(stderr, "trained on %zu windows, final train loss %.6g\n", model.n_sequences,
                 model.final_train_loss);
    return kExitPass;
}

int cmd_faults(const Options& o) {
    Stopwatch clock;
    const auto c = resolve(o);
    if (o.list) {
        json list = json::array();
        for (const auto& f : faults::list_faults()) {
            list.push_back(report::to_json(f));
        }
        emit(report::dump(list), o.out);
        return kExitPass;
    }
    if (o.matrix == !o.fault.empty()) {
        throw MalformedConfig("faults needs exactly one of --fault ID, --matrix or --list");
    }
    kill::MatrixConfig mc{c.mr};
    if (o.matrix) {
        const auto cases = kill::synthetic_cases(c.seed(), o.gate_cases);
        const auto m = kill::run_kill_matrix(faults::list_faults(), cases, mc,
                                             [](const std::string& s) {
                                                 std::fprintf(stderr, "%s\n", s.c_str());
                                             });
        if (o.out.size() > 4 && o.out.ends_with(".csv")) {
            emit(kill::to_csv(m), o.out);
        } else {
            json j = {{"schema_version", report::kSchemaVersion},
                      {"suite", "faults"},
                      {"environment", environment(c, o)},
                      {"data", report::to_json(m)},
                      {"timing", {{"seconds", clock.seconds()}}}};
            j["environment"]["gate_cases"] = o.gate_cases;
            emit(report::dump(j), o.out);
        }
        std::fprintf(stderr, "killed %zu of %zu, kill rate %.4f\n", m.killed, m.rows.size(),
                     m.kill_rate);
        return kExitPass;
    }
    const auto& spec = faults::find_fault(o.fault);
    const auto cases = kill::synthetic_cases(c.seed(), 1);
    const auto& sc = cases.front();
    report::RunReport r{"faults", {}, environment(c, o)};
    std::optional<BaselineSet> baseline;
    if (spec.half == faults::Half::forecaster) {
        auto mr = c.mr;
        mr.train.seed = sc.seed;
        baseline = o.baseline.empty() ? compute_baseline(sc.train, sc.val, mr.train, mr.n_runs)
                                      : report::load_baseline(o.baseline);
    }
    kill::SuiteRun run;
    {
        faults::ScopedFault guard(spec.id);
        run = kill::run_suites(sc, mc, baseline ? &*baseline : nullptr, spec.half);
    }
    r.verdicts = spec.half == faults::Half::correlation ? run.correlation : run.forecaster;
    r.data = {{"fault", report::to_json(spec)}};
    return finish(std::move(r), clock, o.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metamorphic test harness for time-series forecasting pipelines"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key = value settings file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "base seed (overrides METAMORPH_SEED and config)");
        sub->add_option("--fault", o.fault, "activate one catalogued fault");
        sub->add_option("--out", o.out, "write output here instead of stdout");
    };
    auto data = [&](CLI::App* sub) {
        sub->add_option("--train", o.train, "training series CSV");
        sub->add_option("--val", o.val, "validation series CSV");
    };

    auto* corr = app.add_subcommand("corr-mrs", "correlation relations CMR-1..CMR-10");
    common(corr);
    corr->add_option("--data", o.data, "feature table CSV");

    auto* base = app.add_subcommand("baseline", "repeated-run variation baseline");
    common(base);
    data(base);
    base->add_option("--runs", o.runs, "number of training runs");
    base->add_option("--samples", o.samples, "summarize values from a file, one per line");

    auto* fmrs = app.add_subcommand("forecast-mrs", "forecaster relations FMR-1..FMR-9");
    common(fmrs);
    data(fmrs);
    fmrs->add_option("--runs", o.runs, "follow-up runs per retraining relation");
    fmrs->add_option("--baseline", o.baseline, "baseline JSON from the baseline subcommand");

    auto* ts = app.add_subcommand("timesteps", "reconstruction-loss curve over window lengths");
    common(ts);
    ts->add_option("--data", o.data, "series CSV");
    ts->add_option("--time-steps", o.time_steps, "configured window length, for the report");

    auto* adv = app.add_subcommand("adversarial", "gradient search for adversarial inputs");
    common(adv);
    adv->add_option("--model", o.model, "model JSON from the train subcommand");
    adv->add_option("--val", o.val, "validation series CSV");
    adv->add_option("--steps", o.steps, "optimizer steps G");
    adv->add_option("--samples", o.windows, "number of source windows");

    auto* flt = app.add_subcommand("faults", "fault injection and kill matrix");
    common(flt);
    flt->add_flag("--matrix", o.matrix, "run every fault and print the kill matrix");
    flt->add_flag("--list", o.list, "list the fault catalog");
    flt->add_option("--runs", o.runs, "runs per baseline and retraining relation");
    flt->add_option("--baseline", o.baseline, "clean baseline JSON for a single fault");
    flt->add_option("--gate-cases", o.gate_cases, "seeds in the clean-build gate");

    auto* trn = app.add_subcommand("train", "train one model and write it as JSON");
    common(trn);
    trn->add_option("--train", o.train, "training series CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*corr) return cmd_corr_mrs(o);
        if (*base) return cmd_baseline(o);
        if (*fmrs) return cmd_forecast_mrs(o);
        if (*ts) return cmd_timesteps(o);
        if (*adv) return cmd_adversarial(o);
        if (*flt) return cmd_faults(o);
        if (*trn) return cmd_train(o);
    } catch (const CleanBuildFails& e) {
        std::fprintf(stderr, "precondition failed: %s\n", e.what());
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
