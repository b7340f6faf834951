#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "metamorph/lstm.hpp"
#include "metamorph/series.hpp"

namespace metamorph {

struct TrainConfig {
    std::size_t time_steps = 10;
    std::size_t horizon = 2;
    std::size_t batch_size = 16;
    std::size_t hidden_size = 32;
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    double clip_norm = 5.0;
    std::uint64_t seed = 0;

    /// Throws ShapeMismatch if any size or rate is not positive.
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainedModel {
    lstm::Params params;
    Normalizer normalizer{0.0, 1.0};
    TrainConfig config;
    double final_train_loss = 0.0;  ///< MSE over all training windows, normalized space
    std::size_t n_sequences = 0;

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct EvalResult {
    double validation_loss = 0.0;       ///< MSE over all windows, normalized space
    std::vector<double> first_forecast;  ///< first window's forecast, original units
    std::size_t n_windows = 0;

    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Fits the normalizer on `series`, windows it, and runs mini-batch SGD with
/// per-epoch shuffling and L2 gradient clipping. Deterministic per seed.
/// Throws ZeroRange, InsufficientData or MissingValue.
TrainedModel train(const TimeSeries& series, const TrainConfig& config);

/// Validation loss and first-window forecast using the model's training
/// normalizer. Throws InsufficientData or MissingValue.
EvalResult evaluate(const TrainedModel& model, const TimeSeries& val);

/// Mean squared error of the model over a prepared dataset (normalized).
double dataset_loss(const lstm::Params& params, const SequenceDataset& data);

/// JSON artifact with config, normalizer and parameters. Round trips
/// bit-exactly. parse_model and load_model throw MalformedModel.
std::string save_model(const TrainedModel& model);
TrainedModel parse_model(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace metamorph
