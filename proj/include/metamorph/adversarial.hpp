#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "metamorph/lstm.hpp"

namespace metamorph::adversarial {

struct SearchConfig {
    std::size_t steps = 200;         ///< G
    double learning_rate = 0.01;     ///< Adam step size
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double forecast_weight = 1.0;    ///< weight of (2 y_s - y_p)^2; 0 pulls X_p back to X_s
    double max_relative_distance = 0.1;
    double min_ratio = 1.8;
    double max_ratio = 2.2;
};

/// One search from a normalized source window.
struct AdversarialResult {
    std::vector<double> source;     ///< X_s
    std::vector<double> perturbed;  ///< X_p = X_aux^2
    double y_s = 0.0;               ///< first forecast step on X_s, normalized
    double y_p = 0.0;
    double distance_sq = 0.0;       ///< ||X_s - X_p||^2
    double relative_distance = 0.0; ///< ||X_s - X_p|| / ||X_s||
    std::vector<double> loss_trace; ///< total loss before each step and after the last
    bool success = false;

    double initial_loss() const { return loss_trace.front(); }
    double final_loss() const { return loss_trace.back(); }
};

/// Minimizes ||X_s - X_p||^2 + w (2 y_s - y_p)^2 over X_aux with Adam,
/// starting from X_aux = sqrt(X_s). Throws NonPositiveWindow if any source
/// value is negative.
AdversarialResult search(const lstm::Params& params, std::span<const double> source,
                         const SearchConfig& config);

/// Independent searches over many windows, in parallel.
std::vector<AdversarialResult> search_all(const lstm::Params& params,
                                          const std::vector<std::vector<double>>& windows,
                                          const SearchConfig& config);

/// Same searches, one after another.
std::vector<AdversarialResult> search_all_serial(const lstm::Params& params,
                                                 const std::vector<std::vector<double>>& windows,
                                                 const SearchConfig& config);

double success_fraction(std::span<const AdversarialResult> results);

}  // namespace metamorph::adversarial
