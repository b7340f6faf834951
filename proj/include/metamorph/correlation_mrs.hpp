#pragma once

#include <cstdint>
#include <vector>

#include "metamorph/series.hpp"
#include "metamorph/verdict.hpp"

/// Metamorphic relations for the correlation module (CMR-1 ... CMR-10).
///
/// Each check takes a table whose target column is the variable to predict
/// and runs the live `corr` implementation, so an active fault from the
/// catalog is exercised exactly like a real bug would be.
namespace metamorph::corr_mrs {

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kScalingTolerance = 1e-10;
inline constexpr double kPerturbedTolerance = 0.05;
inline constexpr double kMissingFraction = 0.05;

MrVerdict cmr1_bounds(const FeatureTable& table, std::uint64_t seed);
MrVerdict cmr2_symmetry(const FeatureTable& table);
MrVerdict cmr3_relocate_pairs(const FeatureTable& table);
MrVerdict cmr4_duplicate_feature(const FeatureTable& table);
MrVerdict cmr5_negated_feature(const FeatureTable& table);
MrVerdict cmr6_linear_scaling(const FeatureTable& table);
MrVerdict cmr7_zero_correlation(const FeatureTable& table);
MrVerdict cmr8_zero_variance(const FeatureTable& table);
MrVerdict cmr9_outlier(const FeatureTable& table);
MrVerdict cmr10_missing_values(const FeatureTable& table, std::uint64_t seed);

/// All ten in order. Exceptions escaping a check become a fail verdict.
std::vector<MrVerdict> run_suite(const FeatureTable& table, std::uint64_t seed);

}  // namespace metamorph::corr_mrs
