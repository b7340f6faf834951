#include "metamorph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"

namespace metamorph::spectral {

using cplx = std::complex<double>;

namespace {

void require_length(std::size_t n) {
    if (n < kFirstTimeStep + 1) {
        throw SeriesTooShort("time-step analysis needs at least 6 points, got " +
                             std::to_string(n));
    }
}

// e^{-2 pi i m / n} for m in [0, n).
std::vector<cplx> twiddles(std::size_t n) {
    std::vector<cplx> w(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        w[m] = {std::cos(angle), std::sin(angle)};
    }
    return w;
}

std::vector<cplx> transform(std::span<const cplx> x, bool inverse) {
    const std::size_t n = x.size();
    const auto w = twiddles(n);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const cplx t = w[(j * k) % n];
            acc += x[j] * (inverse ? std::conj(t) : t);
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

std::vector<cplx> roll(std::span<const cplx> f, std::size_t by) {
    const std::size_t n = f.size();
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[(i + by) % n] = f[i];
    }
    return out;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> x) { return transform(x, false); }
std::vector<cplx> idft(std::span<const cplx> f) { return transform(f, true); }

std::vector<cplx> fftshift(std::span<const cplx> f) { return roll(f, f.size() / 2); }
std::vector<cplx> ifftshift(std::span<const cplx> f) {
    return roll(f, f.size() - f.size() / 2);
}

double window_loss_reference(std::span<const double> window) {
    const std::size_t n = window.size();
    std::vector<cplx> s(window.begin(), window.end());
    auto shifted = fftshift(dft(s));
    shifted.front() = 0.0;
    shifted.back() = 0.0;
    if (faults::active(faults::FaultId::spectral_drops_dc_bin)) {
        shifted[n / 2] = 0.0;
    }
    const auto recon = idft(ifftshift(shifted));
    double loss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        loss += std::norm(s[j] - recon[j]);
    }
    return loss;
}

std::vector<double> reconstruction_losses_reference(std::span<const double> values) {
    const std::size_t L = values.size();
    require_length(L);
    std::vector<double> losses;
    for (std::size_t t = kFirstTimeStep; t <= L; ++t) {
        const std::size_t windows = L - t + 1;
        double total = 0.0;
        for (std::size_t i = 0; i < windows; ++i) {
            total += window_loss_reference(values.subspan(i, t));
        }
        losses.push_back(total / static_cast<double>(windows * t));
    }
    return losses;
}

std::vector<double> reconstruction_losses(std::span<const double> values) {
    const std::size_t L = values.size();
    require_length(L);
    const bool drop_dc = faults::active(faults::FaultId::spectral_drops_dc_bin);
    std::vector<double> losses(L - kFirstTimeStep + 1);
    const auto count = static_cast<std::ptrdiff_t>(losses.size());

    // Zeroing shifted bins 0 and n-1 removes unshifted bins n - n/2 and
    // n - 1 - n/2. By Parseval the reconstruction error is their energy / n.
    // Windows are centered first; only the DC bin sees the mean.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
        const std::size_t n = kFirstTimeStep + static_cast<std::size_t>(idx);
        const std::size_t a = n - n / 2;
        const std::size_t b = n - 1 - n / 2;
        const auto w = twiddles(n);
        const std::size_t windows = L - n + 1;
        double total = 0.0;
        for (std::size_t i = 0; i < windows; ++i) {
            const auto s = values.subspan(i, n);
            double mean = 0.0;
            for (double v : s) {
                mean += v;
            }
            mean /= static_cast<double>(n);
            cplx fa = 0.0;
            cplx fb = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double c = s[j] - mean;
                fa += c * w[(j * a) % n];
                fb += c * w[(j * b) % n];
            }
            double energy = std::norm(fa) + std::norm(fb);
            if (drop_dc) {
                energy += static_cast<double>(n) * static_cast<double>(n) * mean * mean;
            }
            total += energy / static_cast<double>(n);
        }
        losses[static_cast<std::size_t>(idx)] = total / static_cast<double>(windows * n);
    }
    return losses;
}

std::size_t find_elbow(std::span<const double> losses) {
    if (losses.size() < 2) {
        return kFirstTimeStep;
    }
    // The slope has to drop, so the search starts after the steepest step.
    double max_slope = 0.0;
    std::size_t steepest = 0;
    for (std::size_t i = 1; i < losses.size(); ++i) {
        const double slope = std::abs(losses[i] - losses[i - 1]);
        if (slope > max_slope) {
            max_slope = slope;
            steepest = i;
        }
    }
    if (max_slope == 0.0) {
        return kFirstTimeStep;
    }
    for (std::size_t i = steepest + 1; i < losses.size(); ++i) {
        if (std::abs(losses[i] - losses[i - 1]) < 0.1 * max_slope) {
            return kFirstTimeStep + i;
        }
    }
    return kFirstTimeStep + losses.size() - 1;
}

TimestepLossCurve timestep_curve(std::span<const double> values) {
    TimestepLossCurve curve;
    curve.loss = reconstruction_losses(values);
    curve.time_steps.resize(curve.loss.size());
    for (std::size_t i = 0; i < curve.loss.size(); ++i) {
        curve.time_steps[i] = kFirstTimeStep + i;
    }
    curve.elbow = find_elbow(curve.loss);
    return curve;
}

}  // namespace metamorph::spectral
