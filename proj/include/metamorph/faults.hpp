#pragma once

#include <atomic>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metamorph::faults {

/// Switchable single-site bugs in the reference pipeline. Each value names
/// one hook; `none` is the clean build.
enum class FaultId {
    none,
    // correlation
    corr_missing_sqrt,
    corr_numerator_wrong_mean,
    corr_asymmetric_centering,
    corr_abs_numerator,
    corr_zero_variance_unguarded,
    corr_skip_outlier_screen,
    corr_missing_as_zero,
    corr_fence_multiplier_zero,
    corr_rank_by_signed_r,
    corr_drop_missing_x_only,
    corr_skip_first_pair,
    corr_zero_r_undefined,
    // series / forecaster / baseline
    normalizer_fit_on_validation,
    window_count_off_by_one,
    denormalize_drops_min,
    loader_skips_sort,
    baseline_sd_population,
    zero_range_guard_uses_max,
    normalize_divides_by_max,
    forget_bias_zero,
    shuffle_skipped,
    val_loss_first_window_only,
    rescale_uses_validation_min,
    final_train_loss_skips_last_window,
    spectral_drops_dc_bin,
    adversarial_ascent,
};

enum class MutationClass {
    arithmetic_operator,
    comparison_operator,
    constant_replacement,
    boundary_shift,
    statement_skip,
    data_leakage,
};

/// Which half of the pipeline a fault lives in. Relations of the other half
/// never execute the faulty site, so their kill-matrix cells are reported as
/// not applicable.
enum class Half { correlation, forecaster };

struct FaultSpec {
    FaultId id;
    std::string_view name;
    std::string_view site;
    MutationClass mutation_class;
    Half half;
    bool mandatory;
    std::string_view description;
    std::vector<std::string_view> expected_killers;
};

std::span<const FaultSpec> list_faults();

/// Looks a fault up by its catalog name. Throws UnknownFault.
const FaultSpec& find_fault(std::string_view name);

const FaultSpec& spec_of(FaultId id);

std::string_view to_string(MutationClass cls);
std::string_view to_string(Half half);

namespace detail {
inline std::atomic<FaultId> active_fault{FaultId::none};
}

/// Hook predicate used at every fault site.
inline bool active(FaultId id) noexcept {
    return detail::active_fault.load(std::memory_order_relaxed) == id;
}

inline FaultId current() noexcept { return detail::active_fault.load(std::memory_order_relaxed); }

/// Activates one fault for the lifetime of the guard. At most one fault is
/// active per process; nesting a second activation throws std::logic_error.
class ScopedFault {
public:
    explicit ScopedFault(FaultId id);
    ~ScopedFault();
    ScopedFault(const ScopedFault&) = delete;
    ScopedFault& operator=(const ScopedFault&) = delete;

private:
    FaultId id_;
};

}  // namespace metamorph::faults
