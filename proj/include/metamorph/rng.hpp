#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace metamorph {

/// Seeded random stream with platform-independent output.
///
/// std::mt19937_64 is fully specified by the standard, but the std
/// distributions are not, so the conversions to doubles, bounded integers
/// and normals are done here. Every stochastic step in the library draws
/// from one of these so that a seed reproduces a run bit-for-bit on any
/// conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller; one value per call.
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream tag
/// (splitmix64 finalizer). Used to keep initialization and shuffling streams
/// separate while both follow from one user-visible seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace metamorph
