#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metamorph/series.hpp"

namespace metamorph::corr {

enum class Policy {
    raw,       ///< Eq. (1) on the pairs as given; blank cells are an error
    screened,  ///< drop pairs with a blank cell, then drop outlier pairs
};

struct CorrelationResult {
    std::optional<double> r;  ///< empty when either standard deviation is zero
    std::size_t n_used = 0;
    std::size_t missing_dropped = 0;
    std::vector<std::size_t> outliers_removed;  ///< indices into the input
    std::vector<std::string> warnings;

    bool defined() const noexcept { return r.has_value(); }
};

/// Pearson's r, two-pass (means first, then centered sums).
///
/// Throws LengthMismatch when x and y differ in length, TooFewPairs when
/// fewer than two pairs survive filtering, and MissingValue for blank cells
/// under Policy::raw. A zero standard deviation is not an error: the result
/// is undefined and carries a warning.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                          Policy policy = Policy::screened);

struct PairSet {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::size_t> kept;  ///< input index of each retained pair
};

struct MissingFilter {
    PairSet pairs;
    std::size_t dropped = 0;
};

/// Pairwise deletion: a pair goes iff either side is blank.
MissingFilter drop_missing_pairs(std::span<const double> x, std::span<const double> y);

struct OutlierFilter {
    PairSet pairs;
    std::vector<std::size_t> removed;
};

/// Removes pairs where either coordinate falls outside
/// [Q1 - 3 IQR, Q3 + 3 IQR] of its own column (linear-interpolated
/// quartiles). Inputs shorter than four pairs come back unchanged.
OutlierFilter remove_outlier_pairs(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated quantile of already sorted data, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

struct RankedFeature {
    std::string name;
    double score;  ///< |r|
    double r;
};

struct UndefinedFeature {
    std::string name;
    std::string reason;
};

struct FeatureRanking {
    std::vector<RankedFeature> ranked;  ///< descending score, ties by name
    std::vector<UndefinedFeature> undefined;
    std::vector<std::string> warnings;

    /// Position of a feature in `ranked`, if present.
    std::optional<std::size_t> position(std::string_view name) const;
};

/// Scores every non-target column by |pearson(column, target, screened)|.
/// Throws TargetConstant when the target has zero variance.
FeatureRanking rank_features(const FeatureTable& table, std::string_view target);
FeatureRanking rank_features(const FeatureTable& table);

}  // namespace metamorph::corr
