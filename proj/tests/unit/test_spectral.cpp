#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/rng.hpp"
#include "metamorph/series.hpp"
#include "metamorph/spectral.hpp"

using namespace metamorph;
using cd = std::complex<double>;

namespace {

std::vector<double> sinusoid(std::size_t n, double period) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    }
    return v;
}

}  // namespace

TEST(Dft, KnownTransformAndInverse) {
    const std::vector<cd> x{1, 2, 3, 4};
    const auto f = spectral::dft(x);
    EXPECT_NEAR(f[0].real(), 10.0, 1e-12);
    EXPECT_NEAR(f[1].real(), -2.0, 1e-12);
    EXPECT_NEAR(f[1].imag(), 2.0, 1e-12);
    EXPECT_NEAR(f[2].real(), -2.0, 1e-12);
    const auto back = spectral::idft(f);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(std::abs(back[i] - x[i]), 0.0, 1e-12);
    }
}

TEST(Dft, ShiftPutsZeroFrequencyMidArray) {
    const std::vector<cd> f{0, 1, 2, 3, 4};
    const auto s = spectral::fftshift(f);
    EXPECT_EQ(s[2], cd(0));
    EXPECT_EQ(spectral::ifftshift(s), f);
    const std::vector<cd> even{0, 1, 2, 3};
    EXPECT_EQ(spectral::fftshift(even)[2], cd(0));
}

TEST(Reconstruction, FastKernelMatchesReferencePipeline) {
    Rng rng(3);
    std::vector<double> v(90);
    for (double& x : v) {
        x = rng.normal(50, 10);
    }
    const auto fast = spectral::reconstruction_losses(v);
    const auto ref = spectral::reconstruction_losses_reference(v);
    ASSERT_EQ(fast.size(), ref.size());
    ASSERT_EQ(fast.size(), v.size() - 4);
    for (std::size_t i = 0; i < fast.size(); ++i) {
        EXPECT_NEAR(fast[i], ref[i], 1e-9 * std::max(1.0, std::abs(ref[i])));
    }
}

TEST(Reconstruction, ConstantSeriesHasZeroLoss) {
    for (double loss : spectral::reconstruction_losses(std::vector<double>(60, 4.5))) {
        EXPECT_NEAR(loss, 0.0, 1e-12);
    }
}

TEST(Reconstruction, InvariantToAddedConstant) {
    const auto v = default_split(1).val;
    const auto a = spectral::reconstruction_losses(v.values());
    const auto b = spectral::reconstruction_losses(v.affine(1.0, 1e4).values());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-9 * std::max(1.0, a[i]));
    }
}

TEST(Reconstruction, DcFaultBreaksShiftInvariance) {
    faults::ScopedFault guard(faults::FaultId::spectral_drops_dc_bin);
    const auto v = default_split(1).val;
    const auto a = spectral::reconstruction_losses(v.values());
    const auto b = spectral::reconstruction_losses(v.affine(1.0, 100.0).values());
    EXPECT_GT(std::abs(a[5] - b[5]), 1.0);
    const auto ref = spectral::reconstruction_losses_reference(v.values());
    EXPECT_NEAR(a[5], ref[5], 1e-9 * ref[5]);
}

TEST(Reconstruction, TooShortSeries) {
    EXPECT_THROW(spectral::reconstruction_losses(std::vector<double>(5, 1.0)), SeriesTooShort);
    EXPECT_EQ(spectral::reconstruction_losses(std::vector<double>{1, 2, 3, 4, 5, 6}).size(), 2u);
}

TEST(Elbow, SinusoidElbowNearPeriod) {
    const auto curve = spectral::timestep_curve(sinusoid(200, 20.0));
    EXPECT_GE(curve.elbow, 10u);
    EXPECT_LE(curve.elbow, 40u);
    EXPECT_LT(curve.loss[15], curve.loss[0]);  // t = 20 below t = 5
}

TEST(Elbow, RuleOnHandMadeCurves) {
    EXPECT_EQ(spectral::find_elbow(std::vector<double>(10, 1.0)), 5u);
    // steepest step 5->6, then flat from 7 on
    EXPECT_EQ(spectral::find_elbow(std::vector<double>{10, 4, 3.9, 3.85, 3.8}), 7u);
    // flat lead-in before the drop is not an elbow
    EXPECT_EQ(spectral::find_elbow(std::vector<double>{10, 9.99, 5, 1, 0.95, 0.9}), 9u);
}

TEST(Elbow, DefaultDataNearPaperScale) {
    const auto curve = spectral::timestep_curve(default_split(1).val.values());
    EXPECT_GE(curve.elbow, 15u);
    EXPECT_LE(curve.elbow, 35u);
}
