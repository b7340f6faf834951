#include "oracles.hpp"

#include <cmath>

#include "metamorph/series.hpp"

namespace oracle {

std::size_t enumerate_windows(std::size_t length, std::size_t time_steps, std::size_t horizon) {
    std::size_t count = 0;
    for (std::size_t start = 0; start < length; ++start) {
        if (start + time_steps + horizon <= length) {
            ++count;
        }
    }
    return count;
}

double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const auto n = static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double num = n * sxy - sx * sy;
    const long double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
    return static_cast<double>(num / den);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Gate {
    std::vector<double> w_x;                // H
    std::vector<std::vector<double>> w_h;   // H x H
    std::vector<double> b;                  // H
};

Gate gate(const metamorph::lstm::Params& p, std::size_t index) {
    const std::size_t H = p.hidden();
    const auto W = p.gate_weights();
    const auto bias = p.gate_bias();
    Gate g{std::vector<double>(H), std::vector<std::vector<double>>(H, std::vector<double>(H)),
           std::vector<double>(H)};
    for (std::size_t j = 0; j < H; ++j) {
        const std::size_t row = index * H + j;
        g.w_x[j] = W[row * (1 + H)];
        for (std::size_t k = 0; k < H; ++k) {
            g.w_h[j][k] = W[row * (1 + H) + 1 + k];
        }
        g.b[j] = bias[row];
    }
    return g;
}

std::vector<double> pre_activation(const Gate& g, double x, const std::vector<double>& h) {
    std::vector<double> z(g.b);
    for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] += g.w_x[j] * x;
        for (std::size_t k = 0; k < h.size(); ++k) {
            z[j] += g.w_h[j][k] * h[k];
        }
    }
    return z;
}

}  // namespace

std::vector<double> lstm_forecast(const metamorph::lstm::Params& params,
                                  const std::vector<double>& window) {
    const std::size_t H = params.hidden();
    const Gate in = gate(params, 0), forget = gate(params, 1), cand = gate(params, 2),
               out = gate(params, 3);
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (double x : window) {
        const auto zi = pre_activation(in, x, h);
        const auto zf = pre_activation(forget, x, h);
        const auto zg = pre_activation(cand, x, h);
        const auto zo = pre_activation(out, x, h);
        for (std::size_t j = 0; j < H; ++j) {
            c[j] = sigmoid(zf[j]) * c[j] + sigmoid(zi[j]) * std::tanh(zg[j]);
            h[j] = sigmoid(zo[j]) * std::tanh(c[j]);
        }
    }
    const auto Wy = params.head_weights();
    const auto by = params.head_bias();
    std::vector<double> y(params.horizon());
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] = by[k];
        for (std::size_t j = 0; j < H; ++j) {
            y[k] += Wy[k * H + j] * h[j];
        }
    }
    return y;
}

double lstm_loss(const metamorph::lstm::Params& params, const std::vector<double>& window,
                 const std::vector<double>& target) {
    const auto y = lstm_forecast(params, window);
    double loss = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        loss += (y[k] - target[k]) * (y[k] - target[k]);
    }
    return loss;
}

}  // namespace oracle

namespace fixture {

metamorph::TrainedModel fragile_model(std::uint64_t seed) {
    using namespace metamorph;
    constexpr std::size_t H = 2;
    constexpr std::size_t K = 2;
    constexpr double saturate = 20.0;  // gate biases: input and output open, forget shut
    constexpr double w = 0.1;          // unit 0 carries 0.1 tanh(x_t)
    constexpr double u = 1.0;          // unit 1 carries 0.1 tanh(x_{t-1}) through h0
    constexpr double gain = 3.0;

    lstm::Params p(H, K);
    auto W = p.gate_weights();
    auto b = p.gate_bias();
    const std::size_t cols = 1 + H;
    for (std::size_t j = 0; j < H; ++j) {
        b[j] = saturate;
        b[H + j] = -saturate;
        b[3 * H + j] = saturate;
    }
    W[(2 * H + 0) * cols + 0] = w;
    W[(2 * H + 1) * cols + 1 + 0] = u;
    auto Wy = p.head_weights();
    for (std::size_t k = 0; k < K; ++k) {
        Wy[k * H + 0] = gain / w;
        Wy[k * H + 1] = -gain / (w * u);
    }

    TrainedModel m;
    m.params = std::move(p);
    m.normalizer = fit_normalizer(default_split(seed).train);
    m.config.time_steps = 10;
    m.config.horizon = K;
    m.config.hidden_size = H;
    m.config.epochs = 1;  // never trained; recorded for the model file
    m.config.seed = seed;
    return m;
}

metamorph::TrainConfig quick_config(std::uint64_t seed) {
    metamorph::TrainConfig c;
    c.hidden_size = 4;
    c.epochs = 3;
    c.seed = seed;
    return c;
}

}  // namespace fixture
