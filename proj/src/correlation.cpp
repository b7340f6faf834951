#include "metamorph/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"

namespace metamorph::corr {

using faults::FaultId;

namespace {

bool all_equal(std::span<const double> v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double mean(std::span<const double> v, double divisor) {
    double sum = 0.0;
    for (double e : v) {
        sum += e;
    }
    return sum / divisor;
}

// Rounding can push |r| a few ulps past 1; anything larger is left alone so
// that a broken formula stays visible to the bounds check.
double snap_unit(double r) {
    if (std::abs(r) > 1.0 && std::abs(r) - 1.0 < 1e-12) {
        return std::copysign(1.0, r);
    }
    return r;
}

}  // namespace

double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        return kMissing;
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MissingFilter drop_missing_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("x and y differ in length");
    }
    MissingFilter out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xi = x[i];
        double yi = y[i];
        if (faults::active(FaultId::corr_missing_as_zero)) {
            xi = is_missing(xi) ? 0.0 : xi;
            yi = is_missing(yi) ? 0.0 : yi;
        }
        const bool drop = faults::active(FaultId::corr_drop_missing_x_only)
                              ? is_missing(xi)
                              : is_missing(xi) || is_missing(yi);
        if (drop) {
            ++out.dropped;
            continue;
        }
        out.pairs.x.push_back(xi);
        out.pairs.y.push_back(yi);
        out.pairs.kept.push_back(i);
    }
    return out;
}

OutlierFilter remove_outlier_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("x and y differ in length");
    }
    OutlierFilter out;
    if (x.size() < 4 || faults::active(FaultId::corr_skip_outlier_screen)) {
        out.pairs.x.assign(x.begin(), x.end());
        out.pairs.y.assign(y.begin(), y.end());
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.pairs.kept.push_back(i);
        }
        return out;
    }
    const double k = faults::active(FaultId::corr_fence_multiplier_zero) ? 0.0 : 3.0;
    auto fences = [k](std::span<const double> v) {
        std::vector<double> sorted;
        sorted.reserve(v.size());
        std::copy_if(v.begin(), v.end(), std::back_inserter(sorted),
                     [](double e) { return !is_missing(e); });
        std::sort(sorted.begin(), sorted.end());
        const double q1 = sorted_quantile(sorted, 0.25);
        const double q3 = sorted_quantile(sorted, 0.75);
        const double iqr = q3 - q1;
        return std::pair{q1 - k * iqr, q3 + k * iqr};
    };
    const auto [xlo, xhi] = fences(x);
    const auto [ylo, yhi] = fences(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool outlier = x[i] < xlo || x[i] > xhi || y[i] < ylo || y[i] > yhi;
        if (outlier) {
            out.removed.push_back(i);
            continue;
        }
        out.pairs.x.push_back(x[i]);
        out.pairs.y.push_back(y[i]);
        out.pairs.kept.push_back(i);
    }
    return out;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y, Policy policy) {
    if (x.size() != y.size()) {
        throw LengthMismatch("pearson: x has " + std::to_string(x.size()) + " values, y has " +
                             std::to_string(y.size()));
    }
    CorrelationResult result;
    std::vector<double> xs;
    std::vector<double> ys;
    if (policy == Policy::screened) {
        auto missing = drop_missing_pairs(x, y);
        result.missing_dropped = missing.dropped;
        if (missing.dropped > 0) {
            result.warnings.push_back("dropped " + std::to_string(missing.dropped) +
                                      " pair(s) with missing values");
        }
        auto screened = remove_outlier_pairs(missing.pairs.x, missing.pairs.y);
        for (auto idx : screened.removed) {
            result.outliers_removed.push_back(missing.pairs.kept[idx]);
        }
        if (!screened.removed.empty()) {
            result.warnings.push_back("removed " + std::to_string(screened.removed.size()) +
                                      " outlier pair(s) outside the 3*IQR fences");
        }
        xs = std::move(screened.pairs.x);
        ys = std::move(screened.pairs.y);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (is_missing(x[i]) || is_missing(y[i])) {
                throw MissingValue("raw pearson input has a missing cell at index " +
                                   std::to_string(i));
            }
        }
        xs.assign(x.begin(), x.end());
        ys.assign(y.begin(), y.end());
    }

    const std::size_t n = xs.size();
    if (n < 2) {
        throw TooFewPairs("pearson needs at least 2 pairs, " + std::to_string(n) + " remain");
    }
    result.n_used = n;

    const bool x_constant = all_equal(xs);
    const bool y_constant = all_equal(ys);
    if ((x_constant || y_constant) && !faults::active(FaultId::corr_zero_variance_unguarded)) {
        result.warnings.push_back(std::string("standard deviation of ") +
                                  (x_constant ? "x" : "y") + " is zero; r is undefined");
        return result;
    }

    const auto nd = static_cast<double>(n);
    const double mx = mean(xs, nd);
    const double my = mean(ys, nd);

    double num_mx = mx;
    double num_my = my;
    if (faults::active(FaultId::corr_numerator_wrong_mean)) {
        num_mx = mean(xs, nd - 1.0);
        num_my = mean(ys, nd - 1.0);
    }
    if (faults::active(FaultId::corr_asymmetric_centering)) {
        num_my = mx;
    }
    const std::size_t first = faults::active(FaultId::corr_skip_first_pair) ? 1 : 0;

    double sxy = 0.0;
    for (std::size_t i = first; i < n; ++i) {
        sxy += (xs[i] - num_mx) * (ys[i] - num_my);
    }
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (faults::active(FaultId::corr_abs_numerator)) {
        sxy = std::abs(sxy);
    }
    if (faults::active(FaultId::corr_zero_r_undefined) && sxy == 0.0) {
        result.warnings.push_back("covariance is zero; r is undefined");
        return result;
    }
    const double denom = faults::active(FaultId::corr_missing_sqrt) ? sxx * syy
                                                                     : std::sqrt(sxx) * std::sqrt(syy);
    result.r = snap_unit(sxy / denom);
    return result;
}

std::optional<std::size_t> FeatureRanking::position(std::string_view name) const {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

FeatureRanking rank_features(const FeatureTable& table, std::string_view target) {
    const auto& target_col = table.column(target);
    std::vector<double> present;
    for (double v : target_col.values) {
        if (!is_missing(v)) {
            present.push_back(v);
        }
    }
    if (present.size() < 2 || all_equal(present)) {
        throw TargetConstant("target '" + target_col.name + "' has zero variance");
    }

    FeatureRanking ranking;
    for (const auto& col : table.columns()) {
        if (col.name == target_col.name) {
            continue;
        }
        try {
            auto res = pearson(col.values, target_col.values, Policy::screened);
            for (auto& w : res.warnings) {
                ranking.warnings.push_back(col.name + ": " + w);
            }
            if (!res.r) {
                ranking.undefined.push_back(
                    {col.name, res.warnings.empty() ? "r undefined" : res.warnings.back()});
                continue;
            }
            ranking.ranked.push_back({col.name, std::abs(*res.r), *res.r});
        } catch (const TooFewPairs& e) {
            ranking.undefined.push_back({col.name, e.what()});
        }
    }
    const bool signed_order = faults::active(FaultId::corr_rank_by_signed_r);
    std::sort(ranking.ranked.begin(), ranking.ranked.end(),
              [signed_order](const RankedFeature& a, const RankedFeature& b) {
                  const double sa = signed_order ? a.r : a.score;
                  const double sb = signed_order ? b.r : b.score;
                  if (sa != sb) {
                      return sa > sb;
                  }
                  return a.name < b.name;
              });
    return ranking;
}

FeatureRanking rank_features(const FeatureTable& table) {
    return rank_features(table, table.target_name());
}

}  // namespace metamorph::corr
