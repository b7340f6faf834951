#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace metamorph::spectral {

inline constexpr std::size_t kFirstTimeStep = 5;

/// Reconstruction loss per candidate window length, starting at 5.
struct TimestepLossCurve {
    std::vector<std::size_t> time_steps;
    std::vector<double> loss;
    std::size_t elbow = kFirstTimeStep;
};

/// Naive O(n^2) discrete Fourier transform and its inverse.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> idft(std::span<const std::complex<double>> f);

/// Roll by n/2 so the zero-frequency bin sits mid-array, and back.
std::vector<std::complex<double>> fftshift(std::span<const std::complex<double>> f);
std::vector<std::complex<double>> ifftshift(std::span<const std::complex<double>> f);

/// Squared reconstruction error after zeroing the two outermost shifted
/// bins of one window. Full transform pipeline.
double window_loss_reference(std::span<const double> window);

/// Losses for window lengths 5..size, each the sum of window losses over
/// all stride-1 windows divided by (window count * length).
/// The reference runs the full transform pipeline serially; the default
/// computes only the two removed bins (Parseval) and runs lengths in
/// parallel. Both throw SeriesTooShort below 6 points.
std::vector<double> reconstruction_losses_reference(std::span<const double> values);
std::vector<double> reconstruction_losses(std::span<const double> values);

/// First length after the steepest step whose backward slope magnitude
/// falls below 10% of the largest slope magnitude; 5 for a flat curve.
std::size_t find_elbow(std::span<const double> losses);

TimestepLossCurve timestep_curve(std::span<const double> values);

}  // namespace metamorph::spectral
