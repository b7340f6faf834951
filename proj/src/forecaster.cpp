#include "metamorph/forecaster.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

using faults::FaultId;
using nlohmann::json;

void TrainConfig::validate() const {
    if (time_steps == 0 || horizon == 0 || batch_size == 0 || hidden_size == 0 || epochs == 0) {
        throw ShapeMismatch("time_steps, horizon, batch_size, hidden_size and epochs must be positive");
    }
    if (!(learning_rate > 0.0) || !(clip_norm > 0.0)) {
        throw ShapeMismatch("learning_rate and clip_norm must be positive");
    }
}

double dataset_loss(const lstm::Params& params, const SequenceDataset& data) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto pred = lstm::predict(params, data.inputs[i]);
        double err = 0.0;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            const double d = pred[k] - data.targets[i][k];
            err += d * d;
        }
        total += err / static_cast<double>(pred.size());
    }
    return total / static_cast<double>(data.size());
}

TrainedModel train(const TimeSeries& series, const TrainConfig& config) {
    config.validate();
    if (series.has_missing()) {
        throw MissingValue("training series has missing cells");
    }
    const Normalizer normalizer = fit_normalizer(series);
    const auto normalized = normalizer.normalize(series.values());
    const auto data = make_sequences(normalized, config.time_steps, config.horizon);

    lstm::Params params = lstm::init_params(config.hidden_size, config.horizon, config.seed);
    lstm::Params grad(config.hidden_size, config.horizon);
    Rng shuffler(derive_seed(config.seed, 2));

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> dy(config.horizon);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (!faults::active(FaultId::shuffle_skipped)) {
            shuffler.shuffle(std::span(order));
        }
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            // Batch loss is the mean over windows and horizon steps.
            const double scale = 1.0 / static_cast<double>((end - start) * config.horizon);
            grad.fill(0.0);
            for (std::size_t b = start; b < end; ++b) {
                const auto& window = data.inputs[order[b]];
                const auto& target = data.targets[order[b]];
                const auto fwd = lstm::forward(params, window);
                for (std::size_t k = 0; k < dy.size(); ++k) {
                    dy[k] = 2.0 * scale * (fwd.forecast[k] - target[k]);
                }
                lstm::backward_from_output(params, fwd.cache, dy, grad);
            }
            double norm_sq = 0.0;
            for (double g : grad.flat()) {
                norm_sq += g * g;
            }
            const double norm = std::sqrt(norm_sq);
            const double step =
                norm > config.clip_norm ? config.learning_rate * config.clip_norm / norm
                                        : config.learning_rate;
            auto p = params.flat();
            const auto g = std::as_const(grad).flat();
            for (std::size_t i = 0; i < p.size(); ++i) {
                p[i] -= step * g[i];
            }
        }
    }

    TrainedModel model{std::move(params), normalizer, config, 0.0, data.size()};
    if (faults::active(FaultId::final_train_loss_skips_last_window) && data.size() > 1) {
        auto trimmed = data;
        trimmed.inputs.pop_back();
        trimmed.targets.pop_back();
        model.final_train_loss = dataset_loss(model.params, trimmed);
    } else {
        model.final_train_loss = dataset_loss(model.params, data);
    }
    return model;
}

EvalResult evaluate(const TrainedModel& model, const TimeSeries& val) {
    if (val.has_missing()) {
        throw MissingValue("validation series has missing cells");
    }
    const Normalizer normalizer = faults::active(FaultId::normalizer_fit_on_validation)
                                      ? fit_normalizer(val)
                                      : model.normalizer;
    const auto normalized = normalizer.normalize(val.values());
    auto data = make_sequences(normalized, model.config.time_steps, model.config.horizon);

    EvalResult result;
    result.n_windows = data.size();
    if (faults::active(FaultId::val_loss_first_window_only)) {
        auto first = data;
        first.inputs.resize(1);
        first.targets.resize(1);
        result.validation_loss = dataset_loss(model.params, first);
    } else {
        result.validation_loss = dataset_loss(model.params, data);
    }

    const auto forecast = lstm::predict(model.params, data.inputs.front());
    result.first_forecast.resize(forecast.size());
    for (std::size_t k = 0; k < forecast.size(); ++k) {
        if (faults::active(FaultId::rescale_uses_validation_min)) {
            const double val_min = *std::min_element(val.values().begin(), val.values().end());
            result.first_forecast[k] =
                (normalizer.max() - normalizer.min()) * forecast[k] + val_min;
        } else {
            result.first_forecast[k] = normalizer.denormalize(forecast[k]);
        }
    }
    return result;
}

// ----------------------------------------------------------------- Artifact

namespace {

constexpr const char* kModelFormat = "metamorph-lstm";
constexpr int kModelVersion = 1;

}  // namespace

std::string save_model(const TrainedModel& model) {
    const auto& c = model.config;
    json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["config"] = {{"time_steps", c.time_steps},   {"horizon", c.horizon},
                   {"batch_size", c.batch_size},   {"hidden_size", c.hidden_size},
                   {"epochs", c.epochs},           {"learning_rate", c.learning_rate},
                   {"clip_norm", c.clip_norm},     {"seed", c.seed}};
    j["normalizer"] = {{"min", model.normalizer.min()}, {"max", model.normalizer.max()}};
    j["final_train_loss"] = model.final_train_loss;
    j["n_sequences"] = model.n_sequences;
    const auto flat = model.params.flat();
    j["params"] = std::vector<double>(flat.begin(), flat.end());
    return j.dump(2);
}

TrainedModel parse_model(std::string_view text) {
    try {
        const auto j = json::parse(text);
        if (j.at("format") != kModelFormat || j.at("version") != kModelVersion) {
            throw MalformedModel("not a metamorph-lstm v1 model");
        }
        TrainedModel m;
        const auto& c = j.at("config");
        m.config.time_steps = c.at("time_steps");
        m.config.horizon = c.at("horizon");
        m.config.batch_size = c.at("batch_size");
        m.config.hidden_size = c.at("hidden_size");
        m.config.epochs = c.at("epochs");
        m.config.learning_rate = c.at("learning_rate");
        m.config.clip_norm = c.at("clip_norm");
        m.config.seed = c.at("seed");
        m.config.validate();
        m.normalizer = Normalizer(j.at("normalizer").at("min"), j.at("normalizer").at("max"));
        m.final_train_loss = j.at("final_train_loss");
        m.n_sequences = j.at("n_sequences");
        m.params = lstm::Params(m.config.hidden_size, m.config.horizon);
        const auto values = j.at("params").get<std::vector<double>>();
        if (values.size() != m.params.size()) {
            throw MalformedModel("parameter count does not match hidden_size and horizon");
        }
        std::copy(values.begin(), values.end(), m.params.flat().begin());
        return m;
    } catch (const json::exception& e) {
        throw MalformedModel(std::string("model file: ") + e.what());
    } catch (const MalformedModel&) {
        throw;
    } catch (const Error& e) {
        throw MalformedModel(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw MalformedModel("cannot write '" + path.string() + "'");
    }
    out << save_model(model) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MalformedModel("cannot open model '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace metamorph
