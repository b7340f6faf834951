#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "metamorph/forecaster_mrs.hpp"
#include "metamorph/series.hpp"

namespace metamorph {

/// Harness settings read from a `key = value` file. Blank lines and text
/// after '#' are ignored. Relative paths resolve against the file's directory.
struct HarnessConfig {
    CsvConfig csv;
    fmr::MrConfig mr;
    std::optional<std::filesystem::path> data_csv;   ///< correlation table
    std::optional<std::filesystem::path> train_csv;
    std::optional<std::filesystem::path> val_csv;

    std::uint64_t seed() const noexcept { return mr.seed; }
    /// Sets both the training base seed and the relation seed.
    void set_seed(std::uint64_t seed) noexcept;
};

/// Throws MalformedConfig on syntax errors, unknown keys, bad numbers or
/// invalid training settings.
HarnessConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
HarnessConfig load_config(const std::filesystem::path& path);

/// Value of METAMORPH_SEED if set. Throws MalformedConfig if it is not an
/// unsigned integer.
std::optional<std::uint64_t> seed_from_env();

}  // namespace metamorph
