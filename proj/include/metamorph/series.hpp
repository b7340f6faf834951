#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace metamorph {

/// Marker for a missing cell. Only FeatureTable columns may carry it; the
/// forecasting path rejects series that contain one.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// One (timestamp, value) row before ordering.
struct Row {
    std::int64_t timestamp;
    double value;
};

/// A univariate series on a strictly increasing integer time axis. ISO dates
/// are stored as seconds since the Unix epoch.
class TimeSeries {
public:
    TimeSeries() = default;

    /// Takes already-ordered data. Throws if timestamps are not strictly
    /// increasing, lengths differ or a value is infinite.
    TimeSeries(std::vector<std::int64_t> timestamps, std::vector<double> values);

    /// Index timestamps 0..n-1.
    static TimeSeries from_values(std::vector<double> values);

    /// Sorts rows by timestamp and rejects duplicates. This is the ordering
    /// step shared with load_csv.
    static TimeSeries from_rows(std::vector<Row> rows);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const std::int64_t> timestamps() const noexcept { return timestamps_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool has_missing() const;

    std::vector<Row> rows() const;

    /// First n points.
    TimeSeries head(std::size_t n) const;

    /// Elementwise affine map a*x + b on the values; timestamps unchanged.
    TimeSeries affine(double scale, double shift) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<std::int64_t> timestamps_;
    std::vector<double> values_;
};

struct Column {
    std::string name;
    std::vector<double> values;  // kMissing marks a blank cell
};

/// Named, timestamp-aligned columns with one designated target.
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<std::int64_t> timestamps, std::vector<Column> columns,
                 std::string target_name);

    std::size_t rows() const noexcept { return timestamps_.size(); }
    std::span<const std::int64_t> timestamps() const noexcept { return timestamps_; }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::string& target_name() const noexcept { return target_; }

    bool has_column(std::string_view name) const;
    /// Throws UnknownColumn.
    const Column& column(std::string_view name) const;

    /// Column as a TimeSeries. Throws MissingValue if it has blank cells.
    TimeSeries series(std::string_view name) const;
    TimeSeries target_series() const { return series(target_); }

    FeatureTable with_column(Column column) const;
    FeatureTable with_columns(std::vector<Column> columns) const;
    FeatureTable with_target(std::string name) const;
    /// Reorders rows: row i of the result is row order[i] of this table.
    FeatureTable with_row_order(std::span<const std::size_t> order) const;

    friend bool operator==(const FeatureTable& a, const FeatureTable& b);

private:
    std::vector<std::int64_t> timestamps_;
    std::vector<Column> columns_;
    std::string target_;
};

/// Column mapping for CSV ingestion.
struct CsvConfig {
    std::string timestamp_column = "timestamp";
    std::string target_column;  // empty: first value column
};

/// Reads a header-first comma-separated file. Timestamps may be integers or
/// ISO-8601 dates (YYYY-MM-DD, optionally followed by Thh:mm[:ss]). Empty
/// cells become kMissing. Rows come back sorted by timestamp.
FeatureTable load_csv(const std::filesystem::path& path, const CsvConfig& config);
FeatureTable parse_csv(std::string_view text, const CsvConfig& config);

/// Writes a series as "timestamp,<name>" CSV.
std::string to_csv(const TimeSeries& series, std::string_view value_name = "value");

/// Parses an ISO-8601 date or date-time to seconds since the epoch.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

/// Input windows and their forecast targets, stride 1.
struct SequenceDataset {
    std::size_t time_steps = 0;
    std::size_t horizon = 0;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;

    std::size_t size() const noexcept { return inputs.size(); }
};

/// Number of windows a series of `length` yields; 0 when too short.
std::size_t sequence_count(std::size_t length, std::size_t time_steps, std::size_t horizon);

/// Window i covers [i, i+time_steps) and its target [i+time_steps,
/// i+time_steps+horizon). Throws InsufficientData when no window fits and
/// MissingValue when the series has blank cells.
SequenceDataset make_sequences(std::span<const double> values, std::size_t time_steps,
                               std::size_t horizon);
SequenceDataset make_sequences(const TimeSeries& series, std::size_t time_steps,
                               std::size_t horizon);

/// Min-max scaling fitted on training data.
class Normalizer {
public:
    /// Throws ZeroRange unless max_x > min_x.
    Normalizer(double min_x, double max_x);

    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

    /// (x - min) / (max - min). Values outside the fitted range map outside
    /// [0, 1]; nothing is clipped.
    double normalize(double x) const;
    /// (max - min) * y + min.
    double denormalize(double y) const;

    std::vector<double> normalize(std::span<const double> xs) const;

    friend bool operator==(const Normalizer&, const Normalizer&) = default;

private:
    // Skips the range check; only fit_normalizer uses it, so the zero-range
    // guard fault can leak a degenerate normalizer.
    struct Unchecked {};
    Normalizer(double min_x, double max_x, Unchecked) : min_(min_x), max_(max_x) {}
    friend Normalizer fit_normalizer(std::span<const double> train);

    double min_ = 0.0;
    double max_ = 1.0;
};

/// Fits on the training values. Throws ZeroRange for constant input,
/// InsufficientData for empty input and MissingValue for blank cells.
Normalizer fit_normalizer(std::span<const double> train);
Normalizer fit_normalizer(const TimeSeries& train);

enum class SynthKind { sine_trend, constant, linear, noise };

/// Deterministic synthetic series on index timestamps 0..length-1:
///   sine_trend: 100 + 0.05 i + 20 sin(2 pi i / 30) + N(0, 2^2)
///   constant:   100
///   linear:     10 + 0.5 i
///   noise:      100 + N(0, 10^2)
TimeSeries synth_series(SynthKind kind, std::size_t length, std::uint64_t seed);

/// Default forecasting data: one 937-point sine_trend series split into 750
/// training and 187 validation points.
struct TrainValSplit {
    TimeSeries train;
    TimeSeries val;
};
TrainValSplit default_split(std::uint64_t seed, std::size_t train_length = 750,
                            std::size_t val_length = 187);

/// Default correlation table: target "sales" (sine_trend) plus features
/// "promo" (0.8 sales + noise), "returns" (-0.5 sales + noise),
/// "footfall" (weak positive) and "weather" (independent noise).
FeatureTable default_table(std::uint64_t seed, std::size_t length = 750);

}  // namespace metamorph
