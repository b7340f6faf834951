#include "metamorph/correlation_mrs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "metamorph/correlation.hpp"
#include "metamorph/error.hpp"
#include "metamorph/rng.hpp"

namespace metamorph::corr_mrs {

namespace {

using corr::Policy;

std::vector<const Column*> features(const FeatureTable& table) {
    std::vector<const Column*> out;
    for (const auto& col : table.columns()) {
        if (col.name != table.target_name()) {
            out.push_back(&col);
        }
    }
    return out;
}

// NaN-aware "within tolerance": a NaN on either side is never close.
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

MrVerdict make(std::string id, std::string expected, double tol) {
    MrVerdict v;
    v.mr_id = std::move(id);
    v.expected = std::move(expected);
    v.tolerance = tol;
    return v;
}

std::string unique_name(const FeatureTable& table, std::string base) {
    std::string name = base;
    for (int i = 2; table.has_column(name); ++i) {
        name = base + "_" + std::to_string(i);
    }
    return name;
}

std::vector<double> target_values(const FeatureTable& table) {
    return table.column(table.target_name()).values;
}

}  // namespace

MrVerdict cmr1_bounds(const FeatureTable& table, std::uint64_t seed) {
    auto v = make("CMR-1", "-1 <= r <= 1 for every defined r", 0.0);
    auto check = [&](const std::string& label, std::span<const double> x, std::span<const double> y) {
        const auto res = corr::pearson(x, y, Policy::screened);
        if (!res.r) {
            return;
        }
        const double r = *res.r;
        if (!(r >= -1.0 && r <= 1.0)) {
            v.observed["r." + label] = r;
            v.escalate(Status::fail, label + ": r = " + fmt(r) + " outside [-1, 1]");
        }
    };

    const auto target = target_values(table);
    for (const auto* col : features(table)) {
        check(col->name, col->values, target);
    }
    check("target_vs_itself", target, target);

    // Seeded probes at several magnitudes: a formula error in the
    // normalization only shows at scales where the sums of squares are
    // far from 1.
    Rng rng(derive_seed(seed, 0xc1));
    std::size_t probes = 0;
    for (double scale : {1e-2, 1.0, 1e2}) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> x(10), y_corr(10), y_indep(10);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = scale * rng.uniform();
                y_corr[i] = x[i] + 0.1 * scale * rng.uniform();
                y_indep[i] = scale * rng.uniform();
            }
            check("probe_corr_" + fmt(scale) + "_" + std::to_string(rep), x, y_corr);
            check("probe_indep_" + fmt(scale) + "_" + std::to_string(rep), x, y_indep);
            probes += 2;
        }
    }
    v.observed["probes"] = static_cast<double>(probes);
    return v;
}

MrVerdict cmr2_symmetry(const FeatureTable& table) {
    auto v = make("CMR-2", "r(x, y) == r(y, x) and ranking unchanged by swapping boundary columns",
                  0.0);
    const auto target = target_values(table);
    const auto feats = features(table);
    for (const auto* col : feats) {
        const auto xy = corr::pearson(col->values, target, Policy::screened);
        const auto yx = corr::pearson(target, col->values, Policy::screened);
        const bool same = xy.r.has_value() == yx.r.has_value() &&
                          (!xy.r || std::memcmp(&*xy.r, &*yx.r, sizeof(double)) == 0);
        if (!same) {
            v.escalate(Status::fail, col->name + ": r(x,y) = " + (xy.r ? fmt(*xy.r) : "undefined") +
                                         " but r(y,x) = " + (yx.r ? fmt(*yx.r) : "undefined"));
        }
        if (xy.r) {
            v.observed["r." + col->name] = *xy.r;
        }
    }

    if (feats.size() < 2) {
        v.escalate(Status::warn, "column swap not applicable: table has a single feature");
        return v;
    }
    const auto before = corr::rank_features(table);
    auto cols = table.columns();
    std::swap(cols.front(), cols.back());
    const auto after = corr::rank_features(table.with_columns(std::move(cols)));
    if (before.ranked.size() != after.ranked.size()) {
        v.escalate(Status::fail, "column swap changed the number of ranked features");
        return v;
    }
    for (std::size_t i = 0; i < before.ranked.size(); ++i) {
        const auto& a = before.ranked[i];
        const auto& b = after.ranked[i];
        if (a.name != b.name || a.r != b.r) {
            v.escalate(Status::fail, "column swap changed rank " + std::to_string(i) + ": " + a.name +
                                         " (" + fmt(a.r) + ") vs " + b.name + " (" + fmt(b.r) + ")");
        }
    }
    return v;
}

MrVerdict cmr3_relocate_pairs(const FeatureTable& table) {
    auto v = make("CMR-3", "r unchanged when one pair is moved to the top or bottom", kExactTolerance);
    const std::size_t n = table.rows();
    if (n < 3) {
        v.escalate(Status::warn, "table too short to relocate a pair");
        return v;
    }
    const std::size_t moved = n / 2;
    std::vector<std::size_t> to_top(n), to_bottom(n);
    to_top[0] = moved;
    for (std::size_t i = 0, j = 1; i < n; ++i) {
        if (i != moved) {
            to_top[j++] = i;
        }
    }
    for (std::size_t i = 0, j = 0; i < n; ++i) {
        if (i != moved) {
            to_bottom[j++] = i;
        }
    }
    to_bottom[n - 1] = moved;

    const auto base = corr::rank_features(table);
    for (const auto& [label, order] : {std::pair{"top", &to_top}, std::pair{"bottom", &to_bottom}}) {
        const auto moved_rank = corr::rank_features(table.with_row_order(*order));
        for (const auto& feat : base.ranked) {
            const auto pos = moved_rank.position(feat.name);
            const double r = pos ? moved_rank.ranked[*pos].r : kMissing;
            v.observed[std::string(label) + ".delta." + feat.name] = std::abs(r - feat.r);
            if (!close(r, feat.r, kExactTolerance)) {
                v.escalate(Status::fail, feat.name + ": moving pair " + std::to_string(moved) +
                                             " to the " + label + " changed r from " + fmt(feat.r) +
                                             " to " + fmt(r));
            }
        }
    }
    return v;
}

MrVerdict cmr4_duplicate_feature(const FeatureTable& table) {
    auto v = make("CMR-4", "exact copy of the target has r = 1 and ranks first", kExactTolerance);
    const std::string name = unique_name(table, "copy_of_" + table.target_name());
    const auto with_copy = table.with_column({name, target_values(table)});
    const auto res = corr::pearson(with_copy.column(name).values, target_values(table));
    if (!res.r) {
        v.escalate(Status::fail, "r of the duplicated target is undefined");
        return v;
    }
    v.observed["r"] = *res.r;
    if (!close(*res.r, 1.0, kExactTolerance)) {
        v.escalate(Status::fail, "r of the duplicated target is " + fmt(*res.r) + ", expected 1");
    }
    const auto ranking = corr::rank_features(with_copy);
    const auto pos = ranking.position(name);
    if (!pos || ranking.ranked[*pos].score != ranking.ranked.front().score) {
        v.escalate(Status::fail, "duplicated target does not share the top rank");
    }
    return v;
}

MrVerdict cmr5_negated_feature(const FeatureTable& table) {
    auto v = make("CMR-5", "negated copy of the target has r = -1 and ranks first by |r|",
                  kExactTolerance);
    const std::string name = unique_name(table, "negated_" + table.target_name());
    auto neg = target_values(table);
    for (double& e : neg) {
        e = -e;
    }
    const auto with_neg = table.with_column({name, neg});
    const auto res = corr::pearson(neg, target_values(table));
    if (!res.r) {
        v.escalate(Status::fail, "r of the negated target is undefined");
        return v;
    }
    v.observed["r"] = *res.r;
    if (!close(*res.r, -1.0, kExactTolerance)) {
        v.escalate(Status::fail, "r of the negated target is " + fmt(*res.r) + ", expected -1");
    }
    const auto ranking = corr::rank_features(with_neg);
    const auto pos = ranking.position(name);
    if (!pos || ranking.ranked[*pos].score != ranking.ranked.front().score) {
        v.escalate(Status::fail, "negated target does not share the top rank");
    }
    return v;
}

MrVerdict cmr6_linear_scaling(const FeatureTable& table) {
    auto v = make("CMR-6", "r(x, a*y + b) == sign(a) * r(x, y)", kScalingTolerance);
    const auto target = target_values(table);
    const auto feats = features(table);
    std::vector<std::optional<double>> base;
    for (const auto* col : feats) {
        base.push_back(corr::pearson(col->values, target).r);
    }
    double worst = 0.0;
    for (double a : {2.0, -3.0, 0.5}) {
        for (double b : {0.0, 7.0, -11.0}) {
            std::vector<double> z(target.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                z[i] = a * target[i] + b;
            }
            for (std::size_t f = 0; f < feats.size(); ++f) {
                if (!base[f]) {
                    continue;
                }
                const auto scaled = corr::pearson(feats[f]->values, z).r;
                const double expect = std::copysign(1.0, a) * *base[f];
                const double got = scaled ? *scaled : kMissing;
                worst = std::max(worst, std::isnan(got) ? INFINITY : std::abs(got - expect));
                if (!close(got, expect, kScalingTolerance)) {
                    v.escalate(Status::fail, feats[f]->name + " with a=" + fmt(a) + ", b=" + fmt(b) +
                                                 ": r = " + fmt(got) + ", expected " + fmt(expect));
                }
            }
        }
    }
    v.observed["max_abs_error"] = worst;
    return v;
}

MrVerdict cmr7_zero_correlation(const FeatureTable& table) {
    auto v = make("CMR-7", "x={1,0,-1,0}, y={0,1,0,-1} (and tilings) give r = 0 and rank normally",
                  kExactTolerance);
    static constexpr double qx[] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double qy[] = {0.0, 1.0, 0.0, -1.0};
    for (std::size_t tiles : {std::size_t{1}, std::size_t{5}}) {
        const std::size_t n = 4 * tiles;
        std::vector<std::int64_t> ts(n);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = static_cast<std::int64_t>(i);
            x[i] = qx[i % 4];
            y[i] = qy[i % 4];
        }
        const std::string label = "tiles" + std::to_string(tiles);
        try {
            const auto res = corr::pearson(x, y);
            const double r = res.r ? *res.r : kMissing;
            v.observed[label + ".r"] = r;
            if (!close(r, 0.0, kExactTolerance)) {
                v.escalate(Status::fail, label + ": r = " + (res.r ? fmt(r) : "undefined") +
                                             ", expected 0");
            }
            // Injected next to a perfect correlate, the zero-correlation
            // column must rank second with score 0, not drop out.
            FeatureTable quad(ts, {{"y", y}, {"zero_corr", x}, {"y_copy", y}}, "y");
            const auto ranking = corr::rank_features(quad);
            const auto pos = ranking.position("zero_corr");
            if (ranking.ranked.size() != 2 || !pos || *pos != 1 ||
                ranking.ranked[*pos].score != 0.0 || ranking.ranked.front().name != "y_copy") {
                v.escalate(Status::fail, label + ": zero-correlation feature mis-ranked");
            }
        } catch (const Error& e) {
            v.escalate(Status::fail, label + ": " + e.what());
        }
    }
    (void)table;
    return v;
}

MrVerdict cmr8_zero_variance(const FeatureTable& table) {
    auto v = make("CMR-8", "constant column gives undefined r with a warning, no exception", 0.0);
    const auto target = target_values(table);
    for (double c : {1.0, 0.0}) {
        const std::string name = unique_name(table, "constant_" + fmt(c));
        const std::vector<double> constant(table.rows(), c);
        try {
            const auto res = corr::pearson(constant, target);
            if (res.r) {
                v.observed[name + ".r"] = *res.r;
                v.escalate(Status::fail, name + ": r reported as " + fmt(*res.r) +
                                             " for a zero-variance column");
            } else if (res.warnings.empty()) {
                v.escalate(Status::fail, name + ": undefined r without a warning");
            }
            const auto ranking = corr::rank_features(table.with_column({name, constant}));
            const bool listed = std::any_of(ranking.undefined.begin(), ranking.undefined.end(),
                                            [&](const auto& u) { return u.name == name; });
            if (!listed) {
                v.escalate(Status::fail, name + ": not listed among undefined features");
            }
        } catch (const Error& e) {
            v.escalate(Status::fail, name + ": raised " + e.what());
        }
    }
    return v;
}

MrVerdict cmr9_outlier(const FeatureTable& table) {
    auto v = make("CMR-9", "screened r unchanged (within tolerance) after a 1000*max outlier pair",
                  kPerturbedTolerance);
    const auto feats = features(table);
    const auto target = target_values(table);

    auto max_abs = [](const std::vector<double>& values) {
        double m = 0.0;
        for (double e : values) {
            if (!is_missing(e)) {
                m = std::max(m, std::abs(e));
            }
        }
        return m == 0.0 ? 1.0 : m;
    };
    double target_min = INFINITY;
    for (double e : target) {
        if (!is_missing(e)) {
            target_min = std::min(target_min, e);
        }
    }

    // Outlier row: every feature at 1000 * max|feature|, the target at its
    // minimum, so the point sits far off any positive trend.
    auto ts = std::vector<std::int64_t>(table.timestamps().begin(), table.timestamps().end());
    ts.push_back(ts.empty() ? 0 : *std::max_element(ts.begin(), ts.end()) + 1);
    auto cols = table.columns();
    for (auto& col : cols) {
        col.values.push_back(col.name == table.target_name() ? target_min
                                                             : 1000.0 * max_abs(col.values));
    }
    const FeatureTable injected(ts, cols, table.target_name());
    const auto new_target = injected.column(table.target_name()).values;

    bool warned = false;
    bool raw_moved = false;
    for (const auto* col : feats) {
        const auto before = corr::pearson(col->values, target);
        if (!before.r) {
            continue;
        }
        const auto& x_new = injected.column(col->name).values;
        const auto after = corr::pearson(x_new, new_target);
        const double r_after = after.r ? *after.r : kMissing;
        v.observed["delta." + col->name] = std::abs(r_after - *before.r);
        if (!close(r_after, *before.r, kPerturbedTolerance)) {
            v.escalate(Status::fail, col->name + ": screened r moved from " + fmt(*before.r) + " to " +
                                         (after.r ? fmt(r_after) : "undefined"));
        }
        warned = warned || after.outliers_removed.size() > before.outliers_removed.size();
        try {
            const auto raw = corr::pearson(x_new, new_target, Policy::raw);
            raw_moved = raw_moved || !raw.r || !close(*raw.r, *before.r, kPerturbedTolerance);
        } catch (const Error&) {
            raw_moved = true;
        }
    }
    if (!warned && !feats.empty()) {
        v.escalate(Status::fail, "no outlier warning emitted for the injected pair");
    }
    if (!raw_moved && v.status != Status::fail) {
        v.escalate(Status::warn, "injected pair did not move the unscreened r; check uninformative");
    }
    return v;
}

MrVerdict cmr10_missing_values(const FeatureTable& table, std::uint64_t seed) {
    auto v = make("CMR-10", "screened r unchanged (within tolerance) after blanking 5% of rows",
                  kPerturbedTolerance);
    const std::size_t n = table.rows();
    const auto& cols = table.columns();

    // Candidate rows: every cell strictly inside its column's 10-90%
    // quantile band, so deleting the pair cannot remove an extreme point.
    std::vector<std::pair<double, double>> bands;
    for (const auto& col : cols) {
        std::vector<double> sorted;
        for (double e : col.values) {
            if (!is_missing(e)) {
                sorted.push_back(e);
            }
        }
        std::sort(sorted.begin(), sorted.end());
        bands.emplace_back(corr::sorted_quantile(sorted, 0.10), corr::sorted_quantile(sorted, 0.90));
    }
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < n; ++i) {
        bool inside = true;
        for (std::size_t c = 0; c < cols.size() && inside; ++c) {
            const double e = cols[c].values[i];
            inside = !is_missing(e) && e > bands[c].first && e < bands[c].second;
        }
        if (inside) {
            interior.push_back(i);
        }
    }
    const auto want = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                   std::lround(kMissingFraction * static_cast<double>(n))));
    if (interior.size() < want) {
        v.escalate(Status::warn, "not enough interior rows to blank " + std::to_string(want) + " cells");
        return v;
    }
    Rng rng(derive_seed(seed, 0xc10));
    rng.shuffle(std::span(interior));
    interior.resize(want);
    std::sort(interior.begin(), interior.end());

    auto blanked = cols;
    for (std::size_t row : interior) {
        const auto c = static_cast<std::size_t>(rng.below(blanked.size()));
        blanked[c].values[row] = kMissing;
    }
    const FeatureTable holed(std::vector<std::int64_t>(table.timestamps().begin(), table.timestamps().end()),
                             blanked, table.target_name());
    v.observed["cells_blanked"] = static_cast<double>(want);

    const auto target = target_values(table);
    const auto holed_target = holed.column(table.target_name()).values;
    for (const auto* col : features(table)) {
        const auto before = corr::pearson(col->values, target);
        if (!before.r) {
            continue;
        }
        try {
            const auto after = corr::pearson(holed.column(col->name).values, holed_target);
            const double r_after = after.r ? *after.r : kMissing;
            v.observed["delta." + col->name] = std::abs(r_after - *before.r);
            const auto& hx = holed.column(col->name).values;
            std::size_t blanked_pairs = 0;
            for (std::size_t i = 0; i < n; ++i) {
                blanked_pairs += is_missing(hx[i]) || is_missing(holed_target[i]) ? 1 : 0;
            }
            if (after.missing_dropped != blanked_pairs) {
                v.escalate(Status::fail, col->name + ": " + std::to_string(after.missing_dropped) +
                                             " pairs deleted for " + std::to_string(blanked_pairs) +
                                             " blanked");
            }
            if (!close(r_after, *before.r, kPerturbedTolerance)) {
                v.escalate(Status::fail, col->name + ": r moved from " + fmt(*before.r) + " to " +
                                             (after.r ? fmt(r_after) : "undefined"));
            }
        } catch (const Error& e) {
            v.escalate(Status::fail, col->name + ": raised " + e.what());
        }
    }
    return v;
}

std::vector<MrVerdict> run_suite(const FeatureTable& table, std::uint64_t seed) {
    using Check = MrVerdict (*)(const FeatureTable&, std::uint64_t);
    static const std::pair<const char*, Check> checks[] = {
        {"CMR-1", [](const FeatureTable& t, std::uint64_t s) { return cmr1_bounds(t, s); }},
        {"CMR-2", [](const FeatureTable& t, std::uint64_t) { return cmr2_symmetry(t); }},
        {"CMR-3", [](const FeatureTable& t, std::uint64_t) { return cmr3_relocate_pairs(t); }},
        {"CMR-4", [](const FeatureTable& t, std::uint64_t) { return cmr4_duplicate_feature(t); }},
        {"CMR-5", [](const FeatureTable& t, std::uint64_t) { return cmr5_negated_feature(t); }},
        {"CMR-6", [](const FeatureTable& t, std::uint64_t) { return cmr6_linear_scaling(t); }},
        {"CMR-7", [](const FeatureTable& t, std::uint64_t) { return cmr7_zero_correlation(t); }},
        {"CMR-8", [](const FeatureTable& t, std::uint64_t) { return cmr8_zero_variance(t); }},
        {"CMR-9", [](const FeatureTable& t, std::uint64_t) { return cmr9_outlier(t); }},
        {"CMR-10", [](const FeatureTable& t, std::uint64_t s) { return cmr10_missing_values(t, s); }},
    };
    std::vector<MrVerdict> out;
    for (const auto& [id, check] : checks) {
        try {
            out.push_back(check(table, seed));
        } catch (const std::exception& e) {
            MrVerdict v;
            v.mr_id = id;
            v.escalate(Status::fail, std::string("relation raised: ") + e.what());
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace metamorph::corr_mrs
