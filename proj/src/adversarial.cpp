#include "metamorph/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"

namespace metamorph::adversarial {

namespace {

struct Evaluation {
    double loss;
    double y_p;
    std::vector<double> grad_aux;  // dL/dX_aux
};

// X_aux^2 written as X_s + (X_aux - X_aux0)(X_aux + X_aux0), so the start
// point reproduces X_s exactly rather than sqrt(X_s)^2.
std::vector<double> perturbed(std::span<const double> source, std::span<const double> aux,
                              std::span<const double> aux0) {
    std::vector<double> xp(source.size());
    for (std::size_t j = 0; j < xp.size(); ++j) {
        xp[j] = std::max(0.0, source[j] + (aux[j] - aux0[j]) * (aux[j] + aux0[j]));
    }
    return xp;
}

Evaluation evaluate_at(const lstm::Params& params, std::span<const double> source,
                       std::span<const double> aux, std::span<const double> aux0, double y_s,
                       double weight) {
    const std::size_t n = source.size();
    const auto xp = perturbed(source, aux, aux0);
    const auto fwd = lstm::forward(params, xp);
    const double y_p = fwd.forecast.front();
    const double gap = 2.0 * y_s - y_p;

    double dist = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        dist += (source[j] - xp[j]) * (source[j] - xp[j]);
    }

    std::vector<double> dy(params.horizon(), 0.0);
    dy[0] = -2.0 * weight * gap;
    lstm::Params scratch(params.hidden(), params.horizon());
    std::vector<double> dx(n, 0.0);
    lstm::backward_from_output(params, fwd.cache, dy, scratch, dx);

    Evaluation e{dist + weight * gap * gap, y_p, std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double dxp = 2.0 * (xp[j] - source[j]) + dx[j];
        e.grad_aux[j] = dxp * 2.0 * aux[j];
    }
    return e;
}

}  // namespace

AdversarialResult search(const lstm::Params& params, std::span<const double> source,
                         const SearchConfig& config) {
    const std::size_t n = source.size();
    for (double v : source) {
        if (!(v >= 0.0)) {
            throw NonPositiveWindow("adversarial search needs a non-negative source window");
        }
    }
    AdversarialResult r;
    r.source.assign(source.begin(), source.end());
    r.y_s = lstm::predict(params, source).front();

    std::vector<double> aux(n);
    for (std::size_t j = 0; j < n; ++j) {
        aux[j] = std::sqrt(source[j]);
    }
    const std::vector<double> aux0 = aux;
    std::vector<double> m(n, 0.0);
    std::vector<double> v(n, 0.0);
    const double direction = faults::active(faults::FaultId::adversarial_ascent) ? 1.0 : -1.0;

    auto e = evaluate_at(params, source, aux, aux0, r.y_s, config.forecast_weight);
    r.loss_trace.reserve(config.steps + 1);
    r.loss_trace.push_back(e.loss);
    for (std::size_t step = 1; step <= config.steps; ++step) {
        const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
        for (std::size_t j = 0; j < n; ++j) {
            const double g = e.grad_aux[j];
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            aux[j] += direction * config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
        e = evaluate_at(params, source, aux, aux0, r.y_s, config.forecast_weight);
        r.loss_trace.push_back(e.loss);
    }

    r.perturbed = perturbed(source, aux, aux0);
    double src_sq = 0.0;
    r.distance_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        r.distance_sq += (source[j] - r.perturbed[j]) * (source[j] - r.perturbed[j]);
        src_sq += source[j] * source[j];
    }
    r.y_p = e.y_p;
    r.relative_distance = src_sq > 0.0 ? std::sqrt(r.distance_sq / src_sq)
                                       : (r.distance_sq > 0.0 ? INFINITY : 0.0);
    const double ratio = r.y_s != 0.0 ? r.y_p / r.y_s : NAN;
    r.success = r.relative_distance < config.max_relative_distance && ratio >= config.min_ratio &&
                ratio <= config.max_ratio;
    return r;
}

std::vector<AdversarialResult> search_all_serial(const lstm::Params& params,
                                                 const std::vector<std::vector<double>>& windows,
                                                 const SearchConfig& config) {
    std::vector<AdversarialResult> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        out.push_back(search(params, w, config));
    }
    return out;
}

std::vector<AdversarialResult> search_all(const lstm::Params& params,
                                          const std::vector<std::vector<double>>& windows,
                                          const SearchConfig& config) {
    std::vector<AdversarialResult> out(windows.size());
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(windows.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                search(params, windows[static_cast<std::size_t>(i)], config);
        } catch (...) {
#pragma omp critical(metamorph_adversarial)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

double success_fraction(std::span<const AdversarialResult> results) {
    if (results.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (const auto& r : results) {
        hits += r.success ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

}  // namespace metamorph::adversarial
