#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace metamorph::lstm {

/// Single-layer univariate LSTM with a linear head on the final hidden
/// state. All parameters live in one flat buffer so optimizers and the
/// gradient checker can treat them as a vector.
///
/// Layout, in order:
///   gate weights  4H x (1 + H), row-major; row blocks are the input,
///                 forget, cell and output gates; column 0 multiplies the
///                 input value, columns 1..H the previous hidden state
///   gate biases   4H
///   head weights  horizon x H, row-major
///   head biases   horizon
class Params {
public:
    Params() = default;
    Params(std::size_t hidden, std::size_t horizon);

    std::size_t hidden() const noexcept { return hidden_; }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    std::span<double> gate_weights() noexcept { return flat().subspan(0, gate_weight_count()); }
    std::span<const double> gate_weights() const noexcept {
        return flat().subspan(0, gate_weight_count());
    }
    std::span<double> gate_bias() noexcept { return flat().subspan(gate_weight_count(), 4 * hidden_); }
    std::span<const double> gate_bias() const noexcept {
        return flat().subspan(gate_weight_count(), 4 * hidden_);
    }
    std::span<double> head_weights() noexcept { return flat().subspan(head_offset(), horizon_ * hidden_); }
    std::span<const double> head_weights() const noexcept {
        return flat().subspan(head_offset(), horizon_ * hidden_);
    }
    std::span<double> head_bias() noexcept {
        return flat().subspan(head_offset() + horizon_ * hidden_, horizon_);
    }
    std::span<const double> head_bias() const noexcept {
        return flat().subspan(head_offset() + horizon_ * hidden_, horizon_);
    }

    bool all_finite() const noexcept;
    void fill(double value);

    friend bool operator==(const Params&, const Params&) = default;

private:
    std::size_t gate_weight_count() const noexcept { return 4 * hidden_ * (1 + hidden_); }
    std::size_t head_offset() const noexcept { return gate_weight_count() + 4 * hidden_; }

    std::size_t hidden_ = 0;
    std::size_t horizon_ = 0;
    std::vector<double> data_;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except the
/// forget gate, which starts at 1. Deterministic per seed.
Params init_params(std::size_t hidden, std::size_t horizon, std::uint64_t seed);

/// Activations kept from a forward pass for backpropagation.
struct ForwardCache {
    std::size_t steps = 0;
    std::vector<double> inputs;  ///< T
    std::vector<double> hidden;  ///< (T + 1) x H; row 0 is the zero state
    std::vector<double> cell;    ///< (T + 1) x H
    std::vector<double> gates;   ///< T x 4H, post-activation (i, f, g, o)
    std::vector<double> cell_tanh;  ///< T x H
};

struct ForwardResult {
    std::vector<double> forecast;  ///< horizon values
    ForwardCache cache;
};

/// Runs the recurrence over `window` from a zero state. Throws
/// ShapeMismatch for an empty window.
ForwardResult forward(const Params& params, std::span<const double> window);

/// Forecast only; same arithmetic as forward().
std::vector<double> predict(const Params& params, std::span<const double> window);

/// Backpropagates an output gradient dL/dforecast through the cached pass.
/// Parameter gradients are added into `grad` (same shape as `params`);
/// `input_grad`, when non-empty, receives dL/dwindow (overwritten).
void backward_from_output(const Params& params, const ForwardCache& cache,
                          std::span<const double> output_grad, Params& grad,
                          std::span<double> input_grad = {});

struct Gradients {
    double loss = 0.0;
    Params params;
    std::vector<double> inputs;
};

/// Gradients of loss = scale * sum_k (forecast_k - target_k)^2.
Gradients backward(const Params& params, const ForwardCache& cache,
                   std::span<const double> forecast, std::span<const double> target,
                   double loss_scale = 1.0);

}  // namespace metamorph::lstm
