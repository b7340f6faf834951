#include "metamorph/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_set>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

using faults::FaultId;

namespace {

void check_values(std::span<const double> values) {
    for (double v : values) {
        if (std::isinf(v)) {
            throw MalformedCsv("series value is infinite");
        }
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    for (auto& cell : cells) {
        if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
            cell = cell.substr(1, cell.size() - 2);
        }
    }
    return cells;
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec == std::errc() && ptr == end) {
        return value;
    }
    return parse_iso8601(text);
}

// Stable ordering of row indices by timestamp; duplicate timestamps throw.
std::vector<std::size_t> ordered_indices(std::span<const std::int64_t> timestamps) {
    std::vector<std::size_t> order(timestamps.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    if (!faults::active(FaultId::loader_skips_sort)) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return timestamps[a] < timestamps[b];
        });
    }
    std::unordered_set<std::int64_t> seen;
    seen.reserve(timestamps.size());
    for (auto ts : timestamps) {
        if (!seen.insert(ts).second) {
            throw DuplicateTimestamp("duplicate timestamp " + std::to_string(ts));
        }
    }
    return order;
}

}  // namespace

// ---------------------------------------------------------------- TimeSeries

TimeSeries::TimeSeries(std::vector<std::int64_t> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (timestamps_.size() != values_.size()) {
        throw LengthMismatch("timestamps and values differ in length");
    }
    check_values(values_);
    std::unordered_set<std::int64_t> seen;
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        // Ordering is relaxed only while the loader fault is active so the
        // unsorted rows it produces can reach the forecaster.
        const bool ordered = i == 0 || timestamps_[i] > timestamps_[i - 1];
        if (!ordered && !faults::active(FaultId::loader_skips_sort)) {
            throw DuplicateTimestamp("timestamps not strictly increasing at index " +
                                     std::to_string(i));
        }
        if (!seen.insert(timestamps_[i]).second) {
            throw DuplicateTimestamp("duplicate timestamp " + std::to_string(timestamps_[i]));
        }
    }
}

TimeSeries TimeSeries::from_values(std::vector<double> values) {
    std::vector<std::int64_t> ts(values.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = static_cast<std::int64_t>(i);
    }
    return TimeSeries(std::move(ts), std::move(values));
}

TimeSeries TimeSeries::from_rows(std::vector<Row> rows) {
    std::vector<std::int64_t> ts(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ts[i] = rows[i].timestamp;
    }
    const auto order = ordered_indices(ts);
    std::vector<std::int64_t> sorted_ts(rows.size());
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_ts[i] = rows[order[i]].timestamp;
        values[i] = rows[order[i]].value;
    }
    return TimeSeries(std::move(sorted_ts), std::move(values));
}

bool TimeSeries::has_missing() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return is_missing(v); });
}

std::vector<Row> TimeSeries::rows() const {
    std::vector<Row> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = {timestamps_[i], values_[i]};
    }
    return out;
}

TimeSeries TimeSeries::head(std::size_t n) const {
    n = std::min(n, size());
    return TimeSeries({timestamps_.begin(), timestamps_.begin() + static_cast<std::ptrdiff_t>(n)},
                      {values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)});
}

TimeSeries TimeSeries::affine(double scale, double shift) const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = scale * values_[i] + shift;
    }
    return TimeSeries(timestamps_, std::move(out));
}

// -------------------------------------------------------------- FeatureTable

FeatureTable::FeatureTable(std::vector<std::int64_t> timestamps, std::vector<Column> columns,
                           std::string target_name)
    : timestamps_(std::move(timestamps)), columns_(std::move(columns)), target_(std::move(target_name)) {
    std::set<std::string_view> names;
    for (const auto& col : columns_) {
        if (col.values.size() != timestamps_.size()) {
            throw LengthMismatch("column '" + col.name + "' length differs from the time axis");
        }
        if (!names.insert(col.name).second) {
            throw MalformedCsv("duplicate column name '" + col.name + "'");
        }
        check_values(col.values);
    }
    if (!has_column(target_)) {
        throw UnknownColumn("target column '" + target_ + "' not present");
    }
}

bool FeatureTable::has_column(std::string_view name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

const Column& FeatureTable::column(std::string_view name) const {
    for (const auto& col : columns_) {
        if (col.name == name) {
            return col;
        }
    }
    throw UnknownColumn("unknown column '" + std::string(name) + "'");
}

TimeSeries FeatureTable::series(std::string_view name) const {
    const auto& col = column(name);
    for (double v : col.values) {
        if (is_missing(v)) {
            throw MissingValue("column '" + col.name + "' has missing cells");
        }
    }
    return TimeSeries(timestamps_, col.values);
}

FeatureTable FeatureTable::with_column(Column column) const {
    auto cols = columns_;
    cols.push_back(std::move(column));
    return FeatureTable(timestamps_, std::move(cols), target_);
}

FeatureTable FeatureTable::with_columns(std::vector<Column> columns) const {
    return FeatureTable(timestamps_, std::move(columns), target_);
}

FeatureTable FeatureTable::with_target(std::string name) const {
    return FeatureTable(timestamps_, columns_, std::move(name));
}

FeatureTable FeatureTable::with_row_order(std::span<const std::size_t> order) const {
    if (order.size() != rows()) {
        throw LengthMismatch("row order length differs from table length");
    }
    std::vector<std::int64_t> ts(order.size());
    auto cols = columns_;
    for (std::size_t i = 0; i < order.size(); ++i) {
        ts[i] = timestamps_[order[i]];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            cols[c].values[i] = columns_[c].values[order[i]];
        }
    }
    return FeatureTable(std::move(ts), std::move(cols), target_);
}

bool operator==(const FeatureTable& a, const FeatureTable& b) {
    if (a.timestamps_ != b.timestamps_ || a.target_ != b.target_ ||
        a.columns_.size() != b.columns_.size()) {
        return false;
    }
    for (std::size_t c = 0; c < a.columns_.size(); ++c) {
        const auto& x = a.columns_[c];
        const auto& y = b.columns_[c];
        if (x.name != y.name || x.values.size() != y.values.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            const bool both_missing = is_missing(x.values[i]) && is_missing(y.values[i]);
            if (!both_missing && x.values[i] != y.values[i]) {
                return false;
            }
        }
    }
    return true;
}

// ----------------------------------------------------------------------- CSV

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    // YYYY-MM-DD[Thh:mm[:ss]] ; a space may replace the T.
    auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        if (pos + len > text.size()) {
            return std::nullopt;
        }
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc() || ptr != text.data() + pos + len) {
            return std::nullopt;
        }
        return v;
    };
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    const auto y = number(0, 4);
    const auto m = number(5, 2);
    const auto d = number(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    std::int64_t seconds =
        static_cast<std::int64_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()) * 86400;
    if (text.size() == 10) {
        return seconds;
    }
    if ((text[10] != 'T' && text[10] != ' ') || text.size() < 16 || text[13] != ':') {
        return std::nullopt;
    }
    const auto hh = number(11, 2);
    const auto mm = number(14, 2);
    int ss = 0;
    if (text.size() > 16) {
        const auto s = text.size() >= 19 && text[16] == ':' ? number(17, 2) : std::nullopt;
        if (!s || (text.size() > 19 && text.substr(19) != "Z")) {
            return std::nullopt;
        }
        ss = *s;
    }
    if (!hh || !mm || *hh > 23 || *mm > 59 || ss > 60) {
        return std::nullopt;
    }
    return seconds + *hh * 3600 + *mm * 60 + ss;
}

FeatureTable parse_csv(std::string_view text, const CsvConfig& config) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!trim(line).empty()) {
            lines.push_back(line);
        }
        start = nl + 1;
    }
    if (lines.empty()) {
        throw MalformedCsv("empty file: header row required");
    }
    const auto header = split_line(lines.front());
    std::size_t ts_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == config.timestamp_column) {
            ts_col = i;
        }
    }
    if (ts_col == header.size()) {
        throw UnknownColumn("timestamp column '" + config.timestamp_column + "' not in header");
    }
    if (header.size() < 2) {
        throw MalformedCsv("no value columns");
    }

    std::vector<std::int64_t> ts;
    std::vector<std::vector<double>> cells(header.size());
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_line(lines[r]);
        if (fields.size() != header.size()) {
            throw MalformedCsv("row " + std::to_string(r + 1) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
        }
        const auto stamp = parse_timestamp(fields[ts_col]);
        if (!stamp) {
            throw MalformedCsv("row " + std::to_string(r + 1) + ": bad timestamp '" +
                               std::string(fields[ts_col]) + "'");
        }
        ts.push_back(*stamp);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == ts_col) {
                continue;
            }
            if (fields[c].empty()) {
                cells[c].push_back(kMissing);
                continue;
            }
            const auto v = parse_double(fields[c]);
            if (!v) {
                throw MalformedCsv("row " + std::to_string(r + 1) + ": bad value '" +
                                   std::string(fields[c]) + "'");
            }
            cells[c].push_back(*v);
        }
    }

    const auto order = ordered_indices(ts);
    std::vector<std::int64_t> sorted_ts(ts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_ts[i] = ts[order[i]];
    }
    std::vector<Column> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == ts_col) {
            continue;
        }
        Column col{std::string(header[c]), std::vector<double>(order.size())};
        for (std::size_t i = 0; i < order.size(); ++i) {
            col.values[i] = cells[c][order[i]];
        }
        columns.push_back(std::move(col));
    }
    const std::string target =
        config.target_column.empty() ? columns.front().name : config.target_column;
    return FeatureTable(std::move(sorted_ts), std::move(columns), target);
}

FeatureTable load_csv(const std::filesystem::path& path, const CsvConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MalformedCsv("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), config);
}

std::string to_csv(const TimeSeries& series, std::string_view value_name) {
    std::string out = "timestamp,";
    out += value_name;
    out += '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g\n",
                      static_cast<long long>(series.timestamps()[i]), series[i]);
        out += buf;
    }
    return out;
}

// ----------------------------------------------------------------- Windowing

std::size_t sequence_count(std::size_t length, std::size_t time_steps, std::size_t horizon) {
    if (length < time_steps + horizon) {
        return 0;
    }
    return length - time_steps - horizon + 1;
}

SequenceDataset make_sequences(std::span<const double> values, std::size_t time_steps,
                               std::size_t horizon) {
    if (time_steps == 0 || horizon == 0) {
        throw InsufficientData("time_steps and horizon must be positive");
    }
    for (double v : values) {
        if (is_missing(v)) {
            throw MissingValue("forecasting input has missing cells");
        }
    }
    std::size_t count = sequence_count(values.size(), time_steps, horizon);
    if (faults::active(FaultId::window_count_off_by_one) && count > 0) {
        --count;
    }
    if (count == 0) {
        throw InsufficientData("series of length " + std::to_string(values.size()) +
                               " is shorter than time_steps + horizon = " +
                               std::to_string(time_steps + horizon));
    }
    SequenceDataset out;
    out.time_steps = time_steps;
    out.horizon = horizon;
    out.inputs.reserve(count);
    out.targets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto* base = values.data() + i;
        out.inputs.emplace_back(base, base + time_steps);
        out.targets.emplace_back(base + time_steps, base + time_steps + horizon);
    }
    return out;
}

SequenceDataset make_sequences(const TimeSeries& series, std::size_t time_steps,
                               std::size_t horizon) {
    return make_sequences(series.values(), time_steps, horizon);
}

// ---------------------------------------------------------------- Normalizer

Normalizer::Normalizer(double min_x, double max_x) : min_(min_x), max_(max_x) {
    if (!(max_x > min_x)) {
        throw ZeroRange("normalizer range is zero: min = max = " + std::to_string(min_x));
    }
}

double Normalizer::normalize(double x) const {
    if (faults::active(FaultId::normalize_divides_by_max)) {
        return (x - min_) / max_;
    }
    return (x - min_) / (max_ - min_);
}

double Normalizer::denormalize(double y) const {
    if (faults::active(FaultId::denormalize_drops_min)) {
        return (max_ - min_) * y;
    }
    return (max_ - min_) * y + min_;
}

std::vector<double> Normalizer::normalize(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = normalize(xs[i]);
    }
    return out;
}

Normalizer fit_normalizer(std::span<const double> train) {
    if (train.empty()) {
        throw InsufficientData("cannot fit a normalizer on empty data");
    }
    for (double v : train) {
        if (is_missing(v)) {
            throw MissingValue("training data has missing cells");
        }
    }
    const auto [lo, hi] = std::minmax_element(train.begin(), train.end());
    const bool degenerate = faults::active(FaultId::zero_range_guard_uses_max) ? *hi == 0.0
                                                                                : *hi - *lo == 0.0;
    if (degenerate) {
        throw ZeroRange("training data has zero range (all values " + std::to_string(*lo) + ")");
    }
    return Normalizer(*lo, *hi, Normalizer::Unchecked{});
}

Normalizer fit_normalizer(const TimeSeries& train) { return fit_normalizer(train.values()); }

// ----------------------------------------------------------------- Synthetic

TimeSeries synth_series(SynthKind kind, std::size_t length, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x5e1));
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i);
        switch (kind) {
            case SynthKind::sine_trend:
                v[i] = 100.0 + 0.05 * t + 20.0 * std::sin(2.0 * std::numbers::pi * t / 30.0) +
                       rng.normal(0.0, 2.0);
                break;
            case SynthKind::constant:
                v[i] = 100.0;
                break;
            case SynthKind::linear:
                v[i] = 10.0 + 0.5 * t;
                break;
            case SynthKind::noise:
                v[i] = rng.normal(100.0, 10.0);
                break;
        }
    }
    return TimeSeries::from_values(std::move(v));
}

TrainValSplit default_split(std::uint64_t seed, std::size_t train_length, std::size_t val_length) {
    const auto full = synth_series(SynthKind::sine_trend, train_length + val_length, seed);
    const auto ts = full.timestamps();
    const auto vs = full.values();
    auto slice = [&](std::size_t from, std::size_t to) {
        return TimeSeries({ts.begin() + static_cast<std::ptrdiff_t>(from),
                           ts.begin() + static_cast<std::ptrdiff_t>(to)},
                          {vs.begin() + static_cast<std::ptrdiff_t>(from),
                           vs.begin() + static_cast<std::ptrdiff_t>(to)});
    };
    return {slice(0, train_length), slice(train_length, train_length + val_length)};
}

FeatureTable default_table(std::uint64_t seed, std::size_t length) {
    const auto sales = synth_series(SynthKind::sine_trend, length, seed);
    Rng rng(derive_seed(seed, 0x7ab));
    std::vector<double> promo(length), returns(length), footfall(length), weather(length);
    for (std::size_t i = 0; i < length; ++i) {
        promo[i] = 0.8 * sales[i] + rng.normal(0.0, 5.0);
        returns[i] = -0.5 * sales[i] + rng.normal(0.0, 5.0);
        footfall[i] = 0.2 * sales[i] + rng.normal(0.0, 10.0);
        weather[i] = rng.normal(20.0, 5.0);
    }
    std::vector<std::int64_t> ts(sales.timestamps().begin(), sales.timestamps().end());
    std::vector<Column> cols;
    cols.push_back({"sales", {sales.values().begin(), sales.values().end()}});
    cols.push_back({"promo", std::move(promo)});
    cols.push_back({"returns", std::move(returns)});
    cols.push_back({"footfall", std::move(footfall)});
    cols.push_back({"weather", std::move(weather)});
    return FeatureTable(std::move(ts), std::move(cols), "sales");
}

}  // namespace metamorph
