#include "metamorph/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "metamorph/error.hpp"

namespace metamorph::report {

namespace {

// JSON has no NaN or infinity; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(std::span<const double> xs) {
    json a = json::array();
    for (double x : xs) {
        a.push_back(number(x));
    }
    return a;
}

template <class T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw MalformedReport(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const MrVerdict& v) {
    json observed = json::object();
    for (const auto& [k, x] : v.observed) {
        observed[k] = number(x);
    }
    return {{"mr_id", v.mr_id},
            {"status", to_string(v.status)},
            {"expected", v.expected},
            {"tolerance", number(v.tolerance)},
            {"observed", observed},
            {"details", v.details}};
}

json to_json(const TrainConfig& c) {
    return {{"time_steps", c.time_steps}, {"horizon", c.horizon},
            {"batch_size", c.batch_size}, {"hidden_size", c.hidden_size},
            {"epochs", c.epochs},         {"learning_rate", c.learning_rate},
            {"clip_norm", c.clip_norm},   {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    c.time_steps = field<std::size_t>(j, "time_steps");
    c.horizon = field<std::size_t>(j, "horizon");
    c.batch_size = field<std::size_t>(j, "batch_size");
    c.hidden_size = field<std::size_t>(j, "hidden_size");
    c.epochs = field<std::size_t>(j, "epochs");
    c.learning_rate = field<double>(j, "learning_rate");
    c.clip_norm = field<double>(j, "clip_norm");
    c.seed = field<std::uint64_t>(j, "seed");
    return c;
}

json to_json(const VariationBaseline& b) {
    return {{"n_runs", b.n_runs}, {"mean", number(b.mean)},     {"sd", number(b.sd)},
            {"se", number(b.se)}, {"ci_low", number(b.ci_low)}, {"ci_high", number(b.ci_high)}};
}

json to_json(const RunSample& s) {
    return {{"run_index", s.run_index},
            {"seed", s.seed},
            {"first_forecast", number(s.first_forecast)},
            {"validation_loss", number(s.validation_loss)},
            {"train_loss", number(s.train_loss)}};
}

json to_json(const BaselineSet& b) {
    json samples = json::array();
    for (const auto& s : b.samples) {
        samples.push_back(to_json(s));
    }
    return {{"config", to_json(b.config)},
            {"n_runs", b.n_runs},
            {"forecast", to_json(b.forecast)},
            {"loss", to_json(b.loss)},
            {"train_loss", to_json(b.train_loss)},
            {"samples", samples}};
}

namespace {

VariationBaseline variation_from_json(const json& j) {
    VariationBaseline b;
    b.n_runs = field<std::size_t>(j, "n_runs");
    b.mean = field<double>(j, "mean");
    b.sd = field<double>(j, "sd");
    b.se = field<double>(j, "se");
    b.ci_low = field<double>(j, "ci_low");
    b.ci_high = field<double>(j, "ci_high");
    return b;
}

}  // namespace

BaselineSet baseline_from_json(const json& j) {
    BaselineSet b;
    b.config = train_config_from_json(field<json>(j, "config"));
    b.n_runs = field<std::size_t>(j, "n_runs");
    b.forecast = variation_from_json(field<json>(j, "forecast"));
    b.loss = variation_from_json(field<json>(j, "loss"));
    b.train_loss = variation_from_json(field<json>(j, "train_loss"));
    for (const auto& s : field<json>(j, "samples")) {
        b.samples.push_back({field<std::size_t>(s, "run_index"), field<std::uint64_t>(s, "seed"),
                             field<double>(s, "first_forecast"),
                             field<double>(s, "validation_loss"), field<double>(s, "train_loss")});
    }
    if (b.samples.size() != b.n_runs || b.n_runs < 2) {
        throw MalformedReport("baseline sample count does not match n_runs");
    }
    return b;
}

json to_json(const spectral::TimestepLossCurve& c) {
    return {{"time_steps", c.time_steps}, {"loss", numbers(c.loss)}, {"elbow", c.elbow}};
}

json to_json(const adversarial::AdversarialResult& r) {
    return {{"source", numbers(r.source)},
            {"perturbed", numbers(r.perturbed)},
            {"y_s", number(r.y_s)},
            {"y_p", number(r.y_p)},
            {"distance_sq", number(r.distance_sq)},
            {"relative_distance", number(r.relative_distance)},
            {"initial_loss", number(r.initial_loss())},
            {"final_loss", number(r.final_loss())},
            {"loss_trace", numbers(r.loss_trace)},
            {"success", r.success}};
}

json to_json(const faults::FaultSpec& f) {
    json killers = json::array();
    for (auto k : f.expected_killers) {
        killers.push_back(std::string(k));
    }
    return {{"id", std::string(f.name)},
            {"site", std::string(f.site)},
            {"mutation_class", std::string(faults::to_string(f.mutation_class))},
            {"half", std::string(faults::to_string(f.half))},
            {"mandatory", f.mandatory},
            {"description", std::string(f.description)},
            {"expected_killers", killers}};
}

json to_json(const kill::KillMatrix& m) {
    json rows = json::array();
    for (const auto& r : m.rows) {
        json cells = json::object();
        for (const auto& [id, cell] : r.cells) {
            cells[id] = std::string(kill::to_string(cell));
        }
        rows.push_back({{"fault", to_json(*r.spec)},
                        {"cells", cells},
                        {"killers", r.killers},
                        {"missed_expected", r.missed_expected},
                        {"killed", r.killed},
                        {"output_changed", r.output_changed}});
    }
    json gate = json::array();
    for (const auto& run : m.clean) {
        json verdicts = json::array();
        for (const auto* list : {&run.correlation, &run.forecaster}) {
            for (const auto& v : *list) {
                verdicts.push_back({{"mr_id", v.mr_id}, {"status", to_string(v.status)}});
            }
        }
        gate.push_back(verdicts);
    }
    return {{"seed", m.seed},
            {"gate_cases", m.gate_cases},
            {"clean_gate", gate},
            {"mr_ids", kill::mr_ids()},
            {"rows", rows},
            {"killed", m.killed},
            {"total", m.rows.size()},
            {"kill_rate", number(m.kill_rate)}};
}

json to_json(const RunReport& r) {
    json verdicts = json::array();
    for (const auto& v : r.verdicts) {
        verdicts.push_back(to_json(v));
    }
    const auto c = count(r.verdicts);
    return {{"schema_version", kSchemaVersion},
            {"suite", r.suite},
            {"environment", r.environment},
            {"verdicts", verdicts},
            {"summary", {{"pass", c.pass}, {"warn", c.warn}, {"fail", c.fail}}},
            {"data", r.data},
            {"timing", {{"seconds", r.timing_seconds}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json without_timing(json j) {
    if (j.is_object()) {
        j.erase("timing");
    }
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw MalformedReport("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MalformedReport("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

BaselineSet load_baseline(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw MalformedReport("baseline '" + path.string() + "': " + e.what());
    }
    if (j.contains("data") && j["data"].contains("baseline")) {
        return baseline_from_json(j["data"]["baseline"]);
    }
    return baseline_from_json(j);
}

std::string curve_csv(const spectral::TimestepLossCurve& c) {
    std::string out = "time_steps,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < c.loss.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", c.time_steps[i], c.loss[i]);
        out += buf;
    }
    return out;
}

}  // namespace metamorph::report
