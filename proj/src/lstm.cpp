#include "metamorph/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/rng.hpp"

namespace metamorph::lstm {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Params::Params(std::size_t hidden, std::size_t horizon)
    : hidden_(hidden), horizon_(horizon),
      data_(4 * hidden * (1 + hidden) + 4 * hidden + horizon * hidden + horizon, 0.0) {
    if (hidden == 0 || horizon == 0) {
        throw ShapeMismatch("hidden size and horizon must be positive");
    }
}

bool Params::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Params::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Params init_params(std::size_t hidden, std::size_t horizon, std::uint64_t seed) {
    Params p(hidden, horizon);
    Rng rng(derive_seed(seed, 1));
    const double gate_scale = 1.0 / std::sqrt(static_cast<double>(1 + hidden));
    for (double& w : p.gate_weights()) {
        w = rng.uniform(-gate_scale, gate_scale);
    }
    const double head_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& w : p.head_weights()) {
        w = rng.uniform(-head_scale, head_scale);
    }
    if (!faults::active(faults::FaultId::forget_bias_zero)) {
        auto bias = p.gate_bias();
        std::fill(bias.begin() + static_cast<std::ptrdiff_t>(hidden),
                  bias.begin() + static_cast<std::ptrdiff_t>(2 * hidden), 1.0);
    }
    return p;
}

ForwardResult forward(const Params& params, std::span<const double> window) {
    const std::size_t H = params.hidden();
    const std::size_t T = window.size();
    if (T == 0) {
        throw ShapeMismatch("forward: empty input window");
    }
    const std::size_t cols = 1 + H;
    const auto W = params.gate_weights();
    const auto b = params.gate_bias();

    ForwardResult out;
    auto& c = out.cache;
    c.steps = T;
    c.inputs.assign(window.begin(), window.end());
    c.hidden.assign((T + 1) * H, 0.0);
    c.cell.assign((T + 1) * H, 0.0);
    c.gates.assign(T * 4 * H, 0.0);
    c.cell_tanh.assign(T * H, 0.0);

    for (std::size_t t = 0; t < T; ++t) {
        const double x = window[t];
        const double* h_prev = &c.hidden[t * H];
        const double* c_prev = &c.cell[t * H];
        double* z = &c.gates[t * 4 * H];
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double* row = &W[r * cols];
            double acc = b[r] + row[0] * x;
            for (std::size_t j = 0; j < H; ++j) {
                acc += row[1 + j] * h_prev[j];
            }
            z[r] = acc;
        }
        double* h_next = &c.hidden[(t + 1) * H];
        double* c_next = &c.cell[(t + 1) * H];
        double* tc = &c.cell_tanh[t * H];
        for (std::size_t j = 0; j < H; ++j) {
            const double ig = sigmoid(z[j]);
            const double fg = sigmoid(z[H + j]);
            const double gg = std::tanh(z[2 * H + j]);
            const double og = sigmoid(z[3 * H + j]);
            z[j] = ig;
            z[H + j] = fg;
            z[2 * H + j] = gg;
            z[3 * H + j] = og;
            c_next[j] = fg * c_prev[j] + ig * gg;
            tc[j] = std::tanh(c_next[j]);
            h_next[j] = og * tc[j];
        }
    }

    const std::size_t K = params.horizon();
    const auto Wy = params.head_weights();
    const auto by = params.head_bias();
    const double* h_last = &c.hidden[T * H];
    out.forecast.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double acc = by[k];
        for (std::size_t j = 0; j < H; ++j) {
            acc += Wy[k * H + j] * h_last[j];
        }
        out.forecast[k] = acc;
    }
    return out;
}

std::vector<double> predict(const Params& params, std::span<const double> window) {
    return forward(params, window).forecast;
}

void backward_from_output(const Params& params, const ForwardCache& cache,
                          std::span<const double> output_grad, Params& grad,
                          std::span<double> input_grad) {
    const std::size_t H = params.hidden();
    const std::size_t K = params.horizon();
    const std::size_t T = cache.steps;
    const std::size_t cols = 1 + H;
    if (output_grad.size() != K || grad.size() != params.size() ||
        (!input_grad.empty() && input_grad.size() != T)) {
        throw ShapeMismatch("backward: gradient buffers do not match the parameters");
    }

    const auto W = params.gate_weights();
    const auto Wy = params.head_weights();
    auto dW = grad.gate_weights();
    auto db = grad.gate_bias();
    auto dWy = grad.head_weights();
    auto dby = grad.head_bias();

    std::vector<double> dh(H, 0.0);
    std::vector<double> dc(H, 0.0);
    std::vector<double> dz(4 * H, 0.0);
    std::vector<double> dh_prev(H, 0.0);

    const double* h_last = &cache.hidden[T * H];
    for (std::size_t k = 0; k < K; ++k) {
        const double g = output_grad[k];
        dby[k] += g;
        for (std::size_t j = 0; j < H; ++j) {
            dWy[k * H + j] += g * h_last[j];
            dh[j] += g * Wy[k * H + j];
        }
    }

    for (std::size_t step = T; step-- > 0;) {
        const double* gates = &cache.gates[step * 4 * H];
        const double* tc = &cache.cell_tanh[step * H];
        const double* c_prev = &cache.cell[step * H];
        const double* h_prev = &cache.hidden[step * H];
        for (std::size_t j = 0; j < H; ++j) {
            const double ig = gates[j];
            const double fg = gates[H + j];
            const double gg = gates[2 * H + j];
            const double og = gates[3 * H + j];
            const double d_o = dh[j] * tc[j];
            const double d_c = dc[j] + dh[j] * og * (1.0 - tc[j] * tc[j]);
            dz[j] = d_c * gg * ig * (1.0 - ig);
            dz[H + j] = d_c * c_prev[j] * fg * (1.0 - fg);
            dz[2 * H + j] = d_c * ig * (1.0 - gg * gg);
            dz[3 * H + j] = d_o * og * (1.0 - og);
            dc[j] = d_c * fg;
        }
        const double x = cache.inputs[step];
        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        double dx = 0.0;
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double g = dz[r];
            const double* row = &W[r * cols];
            double* drow = &dW[r * cols];
            db[r] += g;
            drow[0] += g * x;
            dx += g * row[0];
            for (std::size_t j = 0; j < H; ++j) {
                drow[1 + j] += g * h_prev[j];
                dh_prev[j] += g * row[1 + j];
            }
        }
        if (!input_grad.empty()) {
            input_grad[step] = dx;
        }
        dh.swap(dh_prev);
    }
}

Gradients backward(const Params& params, const ForwardCache& cache,
                   std::span<const double> forecast, std::span<const double> target,
                   double loss_scale) {
    if (forecast.size() != params.horizon() || target.size() != params.horizon()) {
        throw ShapeMismatch("backward: target length must equal the horizon");
    }
    Gradients g;
    g.params = Params(params.hidden(), params.horizon());
    g.inputs.assign(cache.steps, 0.0);
    std::vector<double> dy(params.horizon());
    for (std::size_t k = 0; k < dy.size(); ++k) {
        const double err = forecast[k] - target[k];
        g.loss += loss_scale * err * err;
        dy[k] = 2.0 * loss_scale * err;
    }
    backward_from_output(params, cache, dy, g.params, g.inputs);
    return g;
}

}  // namespace metamorph::lstm
