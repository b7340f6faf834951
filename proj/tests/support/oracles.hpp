#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the parameter layout.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "metamorph/forecaster.hpp"
#include "metamorph/lstm.hpp"

namespace oracle {

/// Windows found by trying every start index.
std::size_t enumerate_windows(std::size_t length, std::size_t time_steps, std::size_t horizon);

/// Textbook single-pass Pearson r from raw sums, in long double.
double naive_pearson(const std::vector<double>& x, const std::vector<double>& y);

/// LSTM forward pass written gate by gate from per-gate matrices.
std::vector<double> lstm_forecast(const metamorph::lstm::Params& params,
                                  const std::vector<double>& window);

/// Loss used in the gradient check: sum of squared forecast errors.
double lstm_loss(const metamorph::lstm::Params& params, const std::vector<double>& window,
                 const std::vector<double>& target);

}  // namespace oracle

namespace fixture {

/// Hand-built LSTM whose first forecast step is about 3 (x_t - x_{t-1}) on
/// normalized inputs: small input moves give large output moves. Normalizer
/// fitted on default_split(seed).train; time_steps 10, horizon 2.
metamorph::TrainedModel fragile_model(std::uint64_t seed = 1);

/// Small training setup used by fast unit tests.
metamorph::TrainConfig quick_config(std::uint64_t seed = 1);

}  // namespace fixture
