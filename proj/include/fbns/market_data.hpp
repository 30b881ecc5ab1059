#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fbns/fuzzy.hpp"

namespace fbns {

/// Minute-precision instant with the UTC offset it was written in.
struct Timestamp {
    std::int64_t utc_minutes = 0;  ///< minutes since 1970-01-01T00:00Z
    int offset_minutes = 0;        ///< local = utc + offset

    [[nodiscard]] std::int64_t local_minutes() const noexcept { return utc_minutes + offset_minutes; }
    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Parses YYYY-MM-DD(T| )HH:MM[:00](Z|+HH:MM|-HH:MM). Returns nullopt on malformed input.
[[nodiscard]] std::optional<Timestamp> parse_timestamp(std::string_view text);
/// ISO-8601 with explicit offset, e.g. 2020-10-01T18:05:00-04:00.
[[nodiscard]] std::string format_timestamp(const Timestamp& ts);
/// Local calendar date YYYY-MM-DD of a local-minutes value.
[[nodiscard]] std::string format_local_date(std::int64_t local_minutes);

struct Bar {
    Timestamp timestamp;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::optional<double> volume;

    friend bool operator==(const Bar&, const Bar&) = default;
};

struct BarFormat {
    char delimiter = ',';
    std::string timestamp_column = "timestamp";
    std::string open_column = "open";
    std::string high_column = "high";
    std::string low_column = "low";
    std::string close_column = "close";
    std::string volume_column = "volume";
};

/// Malformed input; line() is 1-based and counts the header.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a bar invariant (OHLC ordering, time order).
class ValidationError : public std::runtime_error {
  public:
    ValidationError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

[[nodiscard]] std::vector<Bar> parse_bars(std::istream& in, const BarFormat& format = {});
/// Inverse of parse_bars: shortest round-trip number formatting.
void write_bars(std::ostream& out, std::span<const Bar> bars, const BarFormat& format = {});

struct FuzzyBarSeries {
    std::vector<Bar> bars;
    std::vector<TriangularFuzzyNumber> fuzzy_prices;  ///< (low, close, high)
    RiskAttitude eta;
    std::vector<double> expectations;
    /// 100 (E_k - E_{k-1}) / E_{k-1}; entry 0 is NaN.
    std::vector<double> pct_changes;
    /// gap_flags[k]: bar k does not follow bar k-1 by exactly the bar interval.
    std::vector<bool> gap_flags;

    [[nodiscard]] std::size_t size() const noexcept { return bars.size(); }
    /// pct_changes without the leading NaN.
    [[nodiscard]] std::span<const double> changes() const noexcept {
        return std::span<const double>(pct_changes).subspan(pct_changes.empty() ? 0 : 1);
    }
};

[[nodiscard]] FuzzyBarSeries to_fuzzy_series(std::vector<Bar> bars, RiskAttitude eta, int bar_minutes = 5);

struct DescriptiveStats {
    double mean;
    double median;
    double minimum;
    double maximum;
    double skewness;  ///< bias-adjusted
    double kurtosis;  ///< bias-adjusted excess
};

/// Requires n >= 4 and nonzero variance.
[[nodiscard]] DescriptiveStats descriptive_stats(std::span<const double> values);

struct SessionConfig {
    /// Bars stamped after this local time of day belong to the next trading day.
    int cutoff_minutes = 17 * 60;
};

/// Trading date (YYYY-MM-DD) of a bar under the session convention.
[[nodiscard]] std::string trading_day(const Timestamp& ts, const SessionConfig& session = {});

struct DailyRealizedVol {
    std::string date;
    double rv = 0.0;
    std::size_t n_returns = 0;
};

struct RealizedVolSeries {
    std::vector<DailyRealizedVol> days;
    std::vector<std::string> warnings;
};

/// Daily sum of squared log returns of the fuzzy-price expectations; overnight
/// returns are excluded and days without an intraday return are skipped with a warning.
[[nodiscard]] RealizedVolSeries realized_volatility(const FuzzyBarSeries& series, const SessionConfig& session = {});

enum class PlotKind { monthly_box, price_histogram, pct_change_histogram, rv_heatmap, rv_line };

/// Throws std::invalid_argument on an unknown name.
[[nodiscard]] PlotKind parse_plot_kind(std::string_view name);
[[nodiscard]] std::string_view plot_kind_name(PlotKind kind);

struct PlotOptions {
    std::size_t bins = 50;
    double rv_threshold = 1e-4;  ///< 0.01%
    SessionConfig session;
};

struct PlotTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] PlotTable emit_plot_data(const FuzzyBarSeries& series, PlotKind kind, const PlotOptions& options = {});
[[nodiscard]] PlotTable emit_plot_data(const RealizedVolSeries& rv, PlotKind kind, const PlotOptions& options = {});
void write_table(std::ostream& out, const PlotTable& table, char delimiter = ',');

struct HistogramBin {
    double lo;
    double hi;
    std::size_t count;
};
/// Equal-width bins over [min, max]; the last bin is closed.
[[nodiscard]] std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

}  // namespace fbns
