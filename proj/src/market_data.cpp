#include "fbns/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "fbns/numeric.hpp"

namespace fbns {

namespace {

// Howard Hinnant's civil-calendar conversions (proleptic Gregorian).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) {
        return false;
    }
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    const auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return r.ec == std::errc{};
}

bool parse_number(std::string_view cell, double& out) {
    while (!cell.empty() && cell.front() == ' ') {
        cell.remove_prefix(1);
    }
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) {
        cell.remove_suffix(1);
    }
    if (cell.empty()) {
        return false;
    }
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return r.ec == std::errc{} && r.ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = trim(text);
    int year, month, day, hour, minute;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':') {
        return std::nullopt;
    }
    if (!read_int(text, 0, 4, year) || !read_int(text, 5, 2, month) || !read_int(text, 8, 2, day) ||
        !read_int(text, 11, 2, hour) || !read_int(text, 14, 2, minute)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        int second;
        if (!read_int(text, pos + 1, 2, second) || second != 0) {
            return std::nullopt;
        }
        pos += 3;
    }
    int offset = 0;
    if (pos == text.size()) {
        return std::nullopt;  // timezone is mandatory
    }
    if (text[pos] == 'Z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        int oh, om;
        if (!read_int(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
            !read_int(text, pos + 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size()) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || hour > 23 || minute > 59) {
        return std::nullopt;
    }
    static constexpr int month_days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (day > month_days[month - 1] + (month == 2 && leap ? 1 : 0)) {
        return std::nullopt;
    }
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    const std::int64_t local = days * 1440 + hour * 60 + minute;
    return Timestamp{local - offset, offset};
}

std::string format_local_date(std::int64_t local_minutes) {
    const Civil c = civil_from_days(floor_div(local_minutes, 1440));
    return fmt::format("{:04d}-{:02d}-{:02d}", c.year, c.month, c.day);
}

std::string format_timestamp(const Timestamp& ts) {
    const std::int64_t local = ts.local_minutes();
    const std::int64_t tod = local - floor_div(local, 1440) * 1440;
    const int off = std::abs(ts.offset_minutes);
    return fmt::format("{}T{:02d}:{:02d}:00{}{:02d}:{:02d}", format_local_date(local), tod / 60, tod % 60,
                       ts.offset_minutes < 0 ? '-' : '+', off / 60, off % 60);
}

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ValidationError::ValidationError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<Bar> parse_bars(std::istream& in, const BarFormat& format) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header row");
    }
    ++line_no;
    const auto header = split(line, format.delimiter);
    auto find_column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) {
                return i;
            }
        }
        if (required) {
            throw ParseError(1, "missing column '" + name + "'");
        }
        return std::nullopt;
    };
    const std::size_t c_ts = *find_column(format.timestamp_column, true);
    const std::size_t c_open = *find_column(format.open_column, true);
    const std::size_t c_high = *find_column(format.high_column, true);
    const std::size_t c_low = *find_column(format.low_column, true);
    const std::size_t c_close = *find_column(format.close_column, true);
    const auto c_volume = find_column(format.volume_column, false);

    std::vector<Bar> bars;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line, format.delimiter);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, fmt::format("expected {} fields, found {}", header.size(), cells.size()));
        }
        Bar bar;
        const auto ts = parse_timestamp(cells[c_ts]);
        if (!ts) {
            throw ParseError(line_no, "malformed timestamp '" + std::string(trim(cells[c_ts])) + "'");
        }
        bar.timestamp = *ts;
        const std::pair<std::size_t, double*> fields[] = {
            {c_open, &bar.open}, {c_high, &bar.high}, {c_low, &bar.low}, {c_close, &bar.close}};
        for (const auto& [col, dst] : fields) {
            if (!parse_number(cells[col], *dst)) {
                throw ParseError(line_no, "malformed number '" + std::string(trim(cells[col])) + "'");
            }
        }
        if (c_volume && !trim(cells[*c_volume]).empty()) {
            double v;
            if (!parse_number(cells[*c_volume], v)) {
                throw ParseError(line_no, "malformed volume");
            }
            if (v < 0.0) {
                throw ValidationError(line_no, "negative volume");
            }
            bar.volume = v;
        }
        if (!(bar.low <= std::min(bar.open, bar.close) && std::max(bar.open, bar.close) <= bar.high)) {
            throw ValidationError(line_no, "OHLC invariant violated (need low <= open, close <= high)");
        }
        if (!(bar.low > 0.0)) {
            throw ValidationError(line_no, "prices must be strictly positive");
        }
        if (!bars.empty() && !(bar.timestamp.utc_minutes > bars.back().timestamp.utc_minutes)) {
            throw ValidationError(line_no, bar.timestamp.utc_minutes == bars.back().timestamp.utc_minutes
                                               ? "duplicate timestamp"
                                               : "timestamps out of order");
        }
        bars.push_back(bar);
    }
    return bars;
}

void write_bars(std::ostream& out, std::span<const Bar> bars, const BarFormat& format) {
    const char d = format.delimiter;
    const bool with_volume = std::any_of(bars.begin(), bars.end(), [](const Bar& b) { return b.volume.has_value(); });
    out << format.timestamp_column << d << format.open_column << d << format.high_column << d << format.low_column
        << d << format.close_column;
    if (with_volume) {
        out << d << format.volume_column;
    }
    out << '\n';
    for (const auto& b : bars) {
        out << format_timestamp(b.timestamp) << d << format_double(b.open) << d << format_double(b.high) << d
            << format_double(b.low) << d << format_double(b.close);
        if (with_volume) {
            out << d << (b.volume ? format_double(*b.volume) : std::string());
        }
        out << '\n';
    }
}

FuzzyBarSeries to_fuzzy_series(std::vector<Bar> bars, RiskAttitude eta, int bar_minutes) {
    FuzzyBarSeries s;
    s.eta = eta;
    const std::size_t n = bars.size();
    s.fuzzy_prices.reserve(n);
    s.expectations.reserve(n);
    s.pct_changes.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.gap_flags.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const Bar& b = bars[k];
        s.fuzzy_prices.emplace_back(b.low, b.close, b.high);
        s.expectations.push_back(expectation(s.fuzzy_prices.back(), eta));
        if (!(s.expectations.back() > 0.0)) {
            throw std::domain_error("fuzzy price expectation must be positive");
        }
        if (k > 0) {
            const double prev = s.expectations[k - 1];
            s.pct_changes[k] = 100.0 * (s.expectations[k] - prev) / prev;
            s.gap_flags[k] = bars[k].timestamp.utc_minutes - bars[k - 1].timestamp.utc_minutes != bar_minutes;
        }
    }
    s.bars = std::move(bars);
    return s;
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 4) {
        throw std::domain_error("descriptive statistics need at least four values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double m = mean(values);
    std::vector<double> d2(n), d3(n), d4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - m;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
        d4[i] = d2[i] * d2[i];
    }
    const double s2 = pairwise_sum(d2);
    if (s2 == 0.0) {
        throw std::domain_error("skewness and kurtosis undefined for zero variance");
    }
    const double nn = static_cast<double>(n);
    const double var = s2 / (nn - 1.0);
    const double sd = std::sqrt(var);
    const double skew = nn / ((nn - 1.0) * (nn - 2.0)) * pairwise_sum(d3) / (var * sd);
    const double kurt = nn * (nn + 1.0) / ((nn - 1.0) * (nn - 2.0) * (nn - 3.0)) * pairwise_sum(d4) / (var * var) -
                        3.0 * (nn - 1.0) * (nn - 1.0) / ((nn - 2.0) * (nn - 3.0));
    return {m, quantile_sorted(sorted, 0.5), sorted.front(), sorted.back(), skew, kurt};
}

std::string trading_day(const Timestamp& ts, const SessionConfig& session) {
    const std::int64_t local = ts.local_minutes();
    const std::int64_t day = floor_div(local, 1440);
    const std::int64_t tod = local - day * 1440;
    return format_local_date((day + (tod > session.cutoff_minutes ? 1 : 0)) * 1440);
}

RealizedVolSeries realized_volatility(const FuzzyBarSeries& series, const SessionConfig& session) {
    RealizedVolSeries out;
    const std::size_t n = series.size();
    std::size_t k = 0;
    while (k < n) {
        const std::string day = trading_day(series.bars[k].timestamp, session);
        std::vector<double> sq;
        std::size_t j = k + 1;
        while (j < n && trading_day(series.bars[j].timestamp, session) == day) {
            const double r = std::log(series.expectations[j]) - std::log(series.expectations[j - 1]);
            sq.push_back(r * r);
            ++j;
        }
        if (sq.empty()) {
            out.warnings.push_back("trading day " + day + " has no intraday return; omitted");
        } else {
            out.days.push_back({day, pairwise_sum(sq), sq.size()});
        }
        k = j;
    }
    return out;
}

PlotKind parse_plot_kind(std::string_view name) {
    for (PlotKind k : {PlotKind::monthly_box, PlotKind::price_histogram, PlotKind::pct_change_histogram,
                       PlotKind::rv_heatmap, PlotKind::rv_line}) {
        if (plot_kind_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown plot kind '" + std::string(name) + "'");
}

std::string_view plot_kind_name(PlotKind kind) {
    switch (kind) {
        case PlotKind::monthly_box:
            return "monthly_box";
        case PlotKind::price_histogram:
            return "price_histogram";
        case PlotKind::pct_change_histogram:
            return "pct_change_histogram";
        case PlotKind::rv_heatmap:
            return "rv_heatmap";
        case PlotKind::rv_line:
            return "rv_line";
    }
    return "";
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    if (values.empty() || bins == 0) {
        throw std::domain_error("histogram needs values and at least one bin");
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].lo = lo + width * static_cast<double>(i);
        out[i].hi = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
        out[i].count = 0;
    }
    for (double v : values) {
        auto i = static_cast<std::size_t>(std::floor((v - lo) / width));
        i = std::min(i, bins - 1);
        // Edge values can round into the neighbouring bin.
        while (i > 0 && v < out[i].lo) {
            --i;
        }
        while (i + 1 < bins && v >= out[i + 1].lo) {
            ++i;
        }
        ++out[i].count;
    }
    return out;
}

namespace {

PlotTable histogram_table(std::span<const double> values, std::size_t bins) {
    PlotTable t{{"bin_lo", "bin_hi", "count"}, {}};
    for (const auto& b : histogram(values, bins)) {
        t.rows.push_back({format_double(b.lo), format_double(b.hi), std::to_string(b.count)});
    }
    return t;
}

PlotTable monthly_box(const FuzzyBarSeries& series, const SessionConfig& session) {
    std::map<std::string, std::vector<double>> months;
    for (std::size_t k = 0; k < series.size(); ++k) {
        months[trading_day(series.bars[k].timestamp, session).substr(0, 7)].push_back(series.expectations[k]);
    }
    PlotTable t{{"month", "n", "whisker_lo", "q1", "median", "q3", "whisker_hi", "outliers"}, {}};
    for (auto& [month, v] : months) {
        std::sort(v.begin(), v.end());
        const double q1 = quantile_sorted(v, 0.25);
        const double q2 = quantile_sorted(v, 0.5);
        const double q3 = quantile_sorted(v, 0.75);
        const double fence_lo = q1 - 1.5 * (q3 - q1);
        const double fence_hi = q3 + 1.5 * (q3 - q1);
        double wlo = q1, whi = q3;
        std::string outliers;
        for (double x : v) {
            if (x < fence_lo || x > fence_hi) {
                outliers += (outliers.empty() ? "" : ";") + format_double(x);
            } else {
                wlo = std::min(wlo, x);
                whi = std::max(whi, x);
            }
        }
        t.rows.push_back({month, std::to_string(v.size()), format_double(wlo), format_double(q1), format_double(q2),
                          format_double(q3), format_double(whi), outliers});
    }
    return t;
}

}  // namespace

PlotTable emit_plot_data(const FuzzyBarSeries& series, PlotKind kind, const PlotOptions& options) {
    switch (kind) {
        case PlotKind::monthly_box:
            return monthly_box(series, options.session);
        case PlotKind::price_histogram:
            return histogram_table(series.expectations, options.bins);
        case PlotKind::pct_change_histogram:
            return histogram_table(series.changes(), options.bins);
        case PlotKind::rv_heatmap:
        case PlotKind::rv_line:
            return emit_plot_data(realized_volatility(series, options.session), kind, options);
    }
    throw std::invalid_argument("unknown plot kind");
}

PlotTable emit_plot_data(const RealizedVolSeries& rv, PlotKind kind, const PlotOptions& options) {
    if (kind == PlotKind::rv_heatmap) {
        PlotTable t{{"date", "rv", "above_threshold"}, {}};
        for (const auto& d : rv.days) {
            t.rows.push_back({d.date, format_double(d.rv), d.rv > options.rv_threshold ? "1" : "0"});
        }
        return t;
    }
    if (kind == PlotKind::rv_line) {
        PlotTable t{{"date", "rv"}, {}};
        for (const auto& d : rv.days) {
            t.rows.push_back({d.date, format_double(d.rv)});
        }
        return t;
    }
    throw std::invalid_argument("plot kind '" + std::string(plot_kind_name(kind)) +
                                "' needs a bar series, not realized volatility");
}

void write_table(std::ostream& out, const PlotTable& table, char delimiter) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? std::string(1, delimiter) : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? std::string(1, delimiter) : "") << row[i];
        }
        out << '\n';
    }
}

}  // namespace fbns
