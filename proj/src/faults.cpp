#include "metamorph/faults.hpp"

#include <stdexcept>

#include "metamorph/error.hpp"

namespace metamorph::faults {

namespace {

using enum MutationClass;

const std::vector<FaultSpec>& catalog() {
    static const std::vector<FaultSpec> specs = {
        // correlation half
        {FaultId::corr_missing_sqrt, "correlation-missing-sqrt", "correlation.pearson",
         arithmetic_operator, Half::correlation, true,
         "denominator multiplies the sums of squares without taking the square root",
         {"CMR-1"}},
        {FaultId::corr_numerator_wrong_mean, "correlation-numerator-wrong-mean", "correlation.pearson",
         constant_replacement, Half::correlation, false,
         "numerator centers with sum/(n-1) instead of the mean", {"CMR-4", "CMR-6"}},
        {FaultId::corr_asymmetric_centering, "correlation-asymmetric-centering", "correlation.pearson",
         arithmetic_operator, Half::correlation, false,
         "numerator centers y with the mean of x", {"CMR-2"}},
        {FaultId::corr_abs_numerator, "correlation-abs-numerator", "correlation.pearson",
         arithmetic_operator, Half::correlation, false,
         "absolute value taken on the covariance sum", {"CMR-5", "CMR-6"}},
        {FaultId::corr_zero_variance_unguarded, "correlation-zero-variance-unguarded",
         "correlation.pearson", statement_skip, Half::correlation, false,
         "zero standard deviation guard skipped; NaN returned as a defined r", {"CMR-8"}},
        {FaultId::corr_skip_outlier_screen, "correlation-skip-outlier-screen",
         "correlation.remove_outlier_pairs", statement_skip, Half::correlation, false,
         "screened policy never removes outlier pairs", {"CMR-9"}},
        {FaultId::corr_missing_as_zero, "correlation-missing-as-zero",
         "correlation.drop_missing_pairs", constant_replacement, Half::correlation, false,
         "missing cells imputed as 0 instead of dropping the pair", {"CMR-10"}},
        {FaultId::corr_fence_multiplier_zero, "correlation-fence-multiplier-zero",
         "correlation.remove_outlier_pairs", constant_replacement, Half::correlation, false,
         "outlier fence multiplier 3 replaced by 0", {"CMR-7"}},
        {FaultId::corr_rank_by_signed_r, "correlation-rank-by-signed-r", "correlation.rank_features",
         comparison_operator, Half::correlation, false,
         "features ranked by signed r instead of |r|", {"CMR-5"}},
        {FaultId::corr_drop_missing_x_only, "correlation-drop-missing-x-only",
         "correlation.drop_missing_pairs", statement_skip, Half::correlation, false,
         "pairwise deletion inspects only the x side", {"CMR-10"}},
        {FaultId::corr_skip_first_pair, "correlation-skip-first-pair", "correlation.pearson",
         boundary_shift, Half::correlation, false,
         "covariance loop starts at index 1", {"CMR-3"}},
        {FaultId::corr_zero_r_undefined, "correlation-zero-r-undefined", "correlation.pearson",
         comparison_operator, Half::correlation, false,
         "zero covariance reported as undefined r", {"CMR-7"}},

        // forecaster half
        {FaultId::normalizer_fit_on_validation, "normalizer-fit-on-validation", "forecaster.evaluate",
         data_leakage, Half::forecaster, true,
         "evaluate refits the normalizer on the validation series", {"FMR-2", "FMR-7"}},
        {FaultId::window_count_off_by_one, "window-count-off-by-one", "series.make_sequences",
         boundary_shift, Half::forecaster, true,
         "sequence generation stops one window early", {"FMR-3", "FMR-4"}},
        {FaultId::denormalize_drops_min, "denormalize-drops-min", "series.denormalize",
         statement_skip, Half::forecaster, true,
         "denormalize omits the + min(X) offset", {"FMR-1"}},
        {FaultId::loader_skips_sort, "loader-skips-sort", "series.from_rows", statement_skip,
         Half::forecaster, true, "rows are kept in file order instead of sorted by timestamp",
         {"FMR-5"}},
        {FaultId::baseline_sd_population, "sd-n-vs-n-minus-1", "variation.summarize",
         constant_replacement, Half::forecaster, true,
         "baseline standard deviation divides by n instead of n-1", {"FMR-1"}},
        {FaultId::zero_range_guard_uses_max, "zero-range-guard-uses-max", "series.fit_normalizer",
         comparison_operator, Half::forecaster, false,
         "zero-range guard tests max == 0 instead of max - min == 0", {"FMR-6"}},
        {FaultId::normalize_divides_by_max, "normalize-divides-by-max", "series.normalize",
         arithmetic_operator, Half::forecaster, false,
         "normalize divides by max(X) instead of max(X) - min(X)", {"FMR-1"}},
        {FaultId::forget_bias_zero, "forget-bias-zero", "forecaster.init_params",
         constant_replacement, Half::forecaster, false,
         "forget-gate bias initialized to 0 instead of 1", {"FMR-1"}},
        {FaultId::shuffle_skipped, "shuffle-skipped", "forecaster.train", statement_skip,
         Half::forecaster, false, "training windows are never shuffled between epochs",
         {"FMR-1"}},
        {FaultId::val_loss_first_window_only, "validation-loss-first-window-only",
         "forecaster.evaluate", boundary_shift, Half::forecaster, false,
         "validation loss averages only the first window", {"FMR-1"}},
        {FaultId::rescale_uses_validation_min, "rescale-uses-validation-min",
         "forecaster.evaluate", data_leakage, Half::forecaster, false,
         "forecast rescaling adds min(validation) instead of min(training)", {"FMR-1"}},
        {FaultId::final_train_loss_skips_last_window, "final-train-loss-skips-last-window",
         "forecaster.train", boundary_shift, Half::forecaster, false,
         "reported training loss omits the last training window", {}},
        {FaultId::spectral_drops_dc_bin, "spectral-drops-dc-bin", "forecaster_mrs.timestep_analysis",
         boundary_shift, Half::forecaster, false,
         "reconstruction zeroes the DC bin instead of the shifted edge bin", {"FMR-8"}},
        {FaultId::adversarial_ascent, "adversarial-gradient-ascent", "forecaster_mrs.adversarial",
         arithmetic_operator, Half::forecaster, false,
         "adversarial optimizer steps along +gradient", {"FMR-9"}},
    };
    return specs;
}

}  // namespace

std::span<const FaultSpec> list_faults() { return catalog(); }

const FaultSpec& find_fault(std::string_view name) {
    for (const auto& spec : catalog()) {
        if (spec.name == name) {
            return spec;
        }
    }
    throw UnknownFault("unknown fault id '" + std::string(name) + "'");
}

const FaultSpec& spec_of(FaultId id) {
    for (const auto& spec : catalog()) {
        if (spec.id == id) {
            return spec;
        }
    }
    throw UnknownFault("fault has no catalog entry");
}

std::string_view to_string(MutationClass cls) {
    switch (cls) {
        case arithmetic_operator: return "arithmetic-operator";
        case comparison_operator: return "comparison-operator";
        case constant_replacement: return "constant-replacement";
        case boundary_shift: return "boundary-shift";
        case statement_skip: return "statement-skip";
        case data_leakage: return "data-leakage";
    }
    return "unknown";
}

std::string_view to_string(Half half) {
    return half == Half::correlation ? "correlation" : "forecaster";
}

ScopedFault::ScopedFault(FaultId id) : id_(id) {
    FaultId expected = FaultId::none;
    if (!detail::active_fault.compare_exchange_strong(expected, id)) {
        throw std::logic_error("a fault is already active in this process");
    }
}

ScopedFault::~ScopedFault() { detail::active_fault.store(FaultId::none); }

}  // namespace metamorph::faults
