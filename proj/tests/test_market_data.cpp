#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "fbns/market_data.hpp"
#include "fbns/numeric.hpp"
#include "fbns/rng.hpp"

using namespace fbns;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Timestamp ts(const char* text) {
    const auto t = parse_timestamp(text);
    REQUIRE(t.has_value());
    return *t;
}

Bar flat_bar(Timestamp t, double price) {
    return {t, price, price, price, price, std::nullopt};
}

std::vector<Bar> parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_bars(in);
}

template <typename E>
std::size_t error_line(const std::string& text) {
    try {
        (void)parse_text(text);
    } catch (const E& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("timestamps") {
    const auto a = ts("2020-10-01T18:05:00-04:00");
    CHECK(a.offset_minutes == -240);
    CHECK(format_timestamp(a) == "2020-10-01T18:05:00-04:00");
    const auto b = ts("2020-10-01T22:05Z");
    CHECK(a.utc_minutes == b.utc_minutes);
    CHECK(b.offset_minutes == 0);
    CHECK(ts("1970-01-01T00:00:00Z").utc_minutes == 0);
    CHECK(ts("2020-03-01T00:00Z").utc_minutes - ts("2020-02-28T00:00Z").utc_minutes == 2 * 1440);
    CHECK(format_local_date(a.local_minutes()) == "2020-10-01");
    CHECK(ts("2020-10-01 22:05:00Z") == b);
    for (const char* bad : {"2020-10-01T18:05:00", "2020-13-01T00:00Z", "2021-02-29T00:00Z",
                            "2020-10-01T24:00Z", "2020-10-01T18:05:30Z", "garbage", ""}) {
        INFO(bad);
        CHECK_FALSE(parse_timestamp(bad).has_value());
    }
}

TEST_CASE("parse_bars accepts valid rows in order") {
    const auto bars = parse_text(
        "timestamp,open,high,low,close,volume\n"
        "2020-10-01T18:05:00-04:00,100,101,99,100.5,10\n"
        "2020-10-01T18:10:00-04:00,100.5,102,100,101,\n"
        "2020-10-01T18:15:00-04:00,101,101,100,100,7\n");
    REQUIRE(bars.size() == 3);
    CHECK(bars[0].high == 101);
    CHECK(bars[1].volume == std::nullopt);
    CHECK(bars[2].volume == 7.0);
    CHECK(bars[2].timestamp.utc_minutes - bars[0].timestamp.utc_minutes == 10);
}

TEST_CASE("parse_bars finds columns by name") {
    const auto bars = parse_text("close,low,extra,high,open,timestamp\n5,4,x,6,5,2020-01-01T00:00Z\n");
    REQUIRE(bars.size() == 1);
    CHECK(bars[0].low == 4);
    CHECK(bars[0].high == 6);
}

TEST_CASE("parse_bars reports problems with line numbers") {
    const std::string header = "timestamp,open,high,low,close\n";
    const std::string ok = "2020-01-01T00:00Z,10,11,9,10\n";
    CHECK(error_line<ValidationError>(header + ok + "2020-01-01T00:05Z,10,9,11,10\n") == 3);
    CHECK(error_line<ValidationError>(header + ok + "2020-01-01T00:00Z,10,11,9,10\n") == 3);
    CHECK(error_line<ValidationError>(header + "2020-01-01T00:05Z,10,11,9,10\n" + ok) == 3);
    CHECK(error_line<ValidationError>(header + "2020-01-01T00:00Z,0,0,0,0\n") == 2);
    CHECK(error_line<ParseError>(header + ok + ok.substr(0, ok.size() - 4) + "\n") == 3);
    CHECK(error_line<ParseError>(header + "2020-01-01T00:00Z,10,abc,9,10\n") == 2);
    CHECK(error_line<ParseError>(header + "yesterday,10,11,9,10\n") == 2);
    CHECK(error_line<ParseError>("timestamp,open,high,low\n") == 1);
}

TEST_CASE("bars round-trip through text") {
    RngStream rng(4, 0);
    std::vector<Bar> bars;
    auto t = ts("2021-03-01T09:30:00+01:00");
    for (int i = 0; i < 200; ++i) {
        const double c = 100 * std::exp(0.01 * rng.normal());
        const double o = 100 * std::exp(0.01 * rng.normal());
        Bar b{t, o, std::max(o, c) * (1 + 0.001 * rng.uniform()), std::min(o, c) * (1 - 0.001 * rng.uniform()), c,
              i % 3 == 0 ? std::nullopt : std::optional<double>(static_cast<double>(rng.below(1000)))};
        bars.push_back(b);
        t.utc_minutes += 5;
    }
    std::ostringstream out;
    write_bars(out, bars);
    CHECK(parse_text(out.str()) == bars);
}

TEST_CASE("fuzzy series") {
    const auto t0 = ts("2020-01-01T00:00Z");
    Timestamp t1 = t0;
    t1.utc_minutes += 5;
    Timestamp t2 = t1;
    t2.utc_minutes += 15;
    std::vector<Bar> bars{{t0, 101, 105, 100, 102, std::nullopt}, flat_bar(t1, 100), flat_bar(t2, 110)};
    const auto s = to_fuzzy_series(bars, RiskAttitude(0.5));
    CHECK_THAT(s.expectations[0], WithinAbs(102.25, 1e-12));
    CHECK(s.fuzzy_prices[1].is_crisp());
    CHECK(s.expectations[1] == 100.0);
    CHECK(std::isnan(s.pct_changes[0]));
    CHECK_THAT(s.pct_changes[1], WithinRel(100.0 * (100.0 - 102.25) / 102.25, 1e-12));
    CHECK_THAT(s.pct_changes[2], WithinRel(10.0, 1e-12));
    CHECK(s.changes().size() == 2);
    CHECK(s.gap_flags == std::vector<bool>{false, false, true});
}

TEST_CASE("expectation sandwich and eta monotonicity") {
    RngStream rng(8, 1);
    std::vector<Bar> bars;
    auto t = ts("2020-01-01T00:00Z");
    for (int i = 0; i < 500; ++i) {
        const double lo = 50 + 50 * rng.uniform();
        const double hi = lo * (1 + 0.05 * rng.uniform());
        const double c = lo + (hi - lo) * rng.uniform();
        bars.push_back({t, c, hi, lo, c, std::nullopt});
        t.utc_minutes += 5;
    }
    std::vector<double> prev;
    for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto s = to_fuzzy_series(bars, RiskAttitude(eta));
        for (std::size_t k = 0; k < bars.size(); ++k) {
            REQUIRE(bars[k].low <= s.expectations[k]);
            REQUIRE(s.expectations[k] <= bars[k].high);
            if (!prev.empty()) {
                REQUIRE(prev[k] <= s.expectations[k]);
            }
        }
        prev = s.expectations;
    }

    std::vector<Bar> flat;
    for (int i = 0; i < 10; ++i) {
        flat.push_back({bars[i].timestamp, 100, 101, 99, 100, std::nullopt});
    }
    const auto flat_series = to_fuzzy_series(flat, RiskAttitude(0.3));
    for (double c : flat_series.changes()) {
        CHECK(c == 0.0);
    }
}

TEST_CASE("descriptive statistics") {
    const std::vector<double> a{1, 2, 3, 4};
    const auto s = descriptive_stats(a);
    CHECK(s.mean == 2.5);
    CHECK(s.median == 2.5);
    CHECK(s.minimum == 1);
    CHECK(s.maximum == 4);
    CHECK_THAT(s.skewness, WithinAbs(0.0, 1e-15));
    CHECK(descriptive_stats(std::vector<double>{5, 1, 4, 2, 3}).median == 3);

    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{1, 1, 1, 1}), std::domain_error);
    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{1, 2, 3}), std::domain_error);

    // Textbook adjusted Fisher-Pearson skewness and excess kurtosis in long double.
    RngStream rng(2, 2);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(5 + rng.below(200));
        for (auto& v : x) {
            v = std::exp(rng.normal());
        }
        if (rep == 0) {
            x = {0, 0, 0, 0, 10};
        }
        const long double n = static_cast<long double>(x.size());
        long double m = 0;
        for (double v : x) {
            m += v;
        }
        m /= n;
        long double m2 = 0, m3 = 0, m4 = 0;
        for (double v : x) {
            const long double d = v - m;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        const long double g1 = m3 / std::pow(m2, 1.5L);
        const long double skew = std::sqrt(n * (n - 1)) / (n - 2) * g1;
        const long double g2 = m4 / (m2 * m2) - 3;
        const long double kurt = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6);
        const auto st = descriptive_stats(x);
        CHECK_THAT(st.mean, WithinRel(static_cast<double>(m), 1e-13));
        CHECK_THAT(st.skewness, WithinAbs(static_cast<double>(skew), 1e-10));
        CHECK_THAT(st.kurtosis, WithinAbs(static_cast<double>(kurt), 1e-10));
        if (rep == 0) {
            CHECK(st.skewness > 0);
            CHECK(st.kurtosis > 0);
        }
    }
}

TEST_CASE("trading day follows the session cutoff") {
    CHECK(trading_day(ts("2020-10-01T16:55:00-04:00")) == "2020-10-01");
    CHECK(trading_day(ts("2020-10-01T17:00:00-04:00")) == "2020-10-01");
    CHECK(trading_day(ts("2020-10-01T18:00:00-04:00")) == "2020-10-02");
    CHECK(trading_day(ts("2020-12-31T23:55:00-05:00")) == "2021-01-01");
    CHECK(trading_day(ts("2020-10-01T22:00:00Z")) == "2020-10-02");
    CHECK(trading_day(ts("2020-10-01T18:00:00-04:00"), SessionConfig{24 * 60}) == "2020-10-01");
}

TEST_CASE("realized volatility") {
    auto t = ts("2020-10-01T09:00:00-04:00");
    std::vector<Bar> bars;
    bars.push_back(flat_bar(t, 100));
    t.utc_minutes += 5;
    bars.push_back(flat_bar(t, 100 * std::exp(0.01)));
    // Next day: a flat stretch, then a lone bar on the day after.
    t.utc_minutes += 1440;
    for (int i = 0; i < 3; ++i) {
        bars.push_back(flat_bar(t, 120));
        t.utc_minutes += 5;
    }
    t.utc_minutes += 1440;
    bars.push_back(flat_bar(t, 90));
    const auto rv = realized_volatility(to_fuzzy_series(bars, RiskAttitude(0.5)));
    REQUIRE(rv.days.size() == 2);
    CHECK(rv.days[0].date == "2020-10-01");
    CHECK_THAT(rv.days[0].rv, WithinRel(1e-4, 1e-10));
    CHECK(rv.days[0].n_returns == 1);
    CHECK(rv.days[1].rv == 0.0);
    CHECK(rv.days[1].n_returns == 2);
    CHECK(rv.warnings.size() == 1);
}

TEST_CASE("realized volatility of a random walk day") {
    RngStream rng(31, 0);
    const double s = 0.002;
    const std::size_t n_bars = 79;
    std::vector<Bar> bars;
    auto t = ts("2020-01-02T09:30:00-05:00");
    for (int day = 0; day < 400; ++day) {
        double p = 100;
        auto bt = t;
        for (std::size_t k = 0; k < n_bars; ++k) {
            bars.push_back(flat_bar(bt, p));
            p *= std::exp(s * rng.normal());
            bt.utc_minutes += 5;
        }
        t.utc_minutes += 1440;
    }
    const auto rv = realized_volatility(to_fuzzy_series(bars, RiskAttitude(0.5)));
    REQUIRE(rv.days.size() == 400);
    std::vector<double> vals;
    for (const auto& d : rv.days) {
        vals.push_back(d.rv);
    }
    const double expect = static_cast<double>(n_bars - 1) * s * s;
    const double se = std::sqrt(sample_variance(vals) / static_cast<double>(vals.size()));
    CHECK(std::abs(mean(vals) - expect) < 3 * se);
}

TEST_CASE("histogram") {
    RngStream rng(3, 3);
    std::vector<double> v(1001);
    for (auto& x : v) {
        x = rng.normal();
    }
    v.back() = *std::max_element(v.begin(), v.end() - 1);
    const auto h = histogram(v, 50);
    REQUIRE(h.size() == 50);
    std::size_t total = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        total += h[i].count;
        if (i > 0) {
            CHECK(h[i].lo == h[i - 1].hi);
        }
    }
    CHECK(total == v.size());
    CHECK(h.back().hi == *std::max_element(v.begin(), v.end()));
    CHECK(h.back().count >= 2);

    const auto c = histogram(std::vector<double>{3, 3, 3}, 4);
    CHECK(c.front().lo == 2.5);
    CHECK(c.back().hi == 3.5);
}

TEST_CASE("plot data") {
    RngStream rng(5, 0);
    std::vector<Bar> bars;
    auto t = ts("2020-10-05T09:00:00-04:00");
    for (int day = 0; day < 20; ++day) {
        auto bt = t;
        for (int k = 0; k < 30; ++k) {
            bars.push_back(flat_bar(bt, 100 * std::exp(0.003 * rng.normal())));
            bt.utc_minutes += 5;
        }
        t.utc_minutes += 1440;
    }
    const auto series = to_fuzzy_series(bars, RiskAttitude(0.5));

    const auto box = emit_plot_data(series, PlotKind::monthly_box);
    REQUIRE(box.rows.size() == 1);
    CHECK(box.rows[0][0] == "2020-10");
    const double q1 = std::stod(box.rows[0][3]);
    const double q2 = std::stod(box.rows[0][4]);
    const double q3 = std::stod(box.rows[0][5]);
    CHECK((q1 <= q2 && q2 <= q3));

    for (auto kind : {PlotKind::price_histogram, PlotKind::pct_change_histogram}) {
        const auto tab = emit_plot_data(series, kind);
        CHECK(tab.rows.size() == 50);
        std::size_t total = 0;
        for (const auto& r : tab.rows) {
            total += std::stoul(r[2]);
        }
        CHECK(total == (kind == PlotKind::price_histogram ? series.size() : series.size() - 1));
    }

    PlotOptions opt;
    const auto rv = realized_volatility(series);
    const double thresholds[] = {1e-4, 2.5e-4, 1.0};
    for (double th : thresholds) {
        opt.rv_threshold = th;
        const auto heat = emit_plot_data(series, PlotKind::rv_heatmap, opt);
        std::size_t flagged = 0;
        for (const auto& r : heat.rows) {
            flagged += r[2] == "1";
        }
        std::size_t expect = 0;
        for (const auto& d : rv.days) {
            expect += d.rv > th;
        }
        CHECK(flagged == expect);
    }
    CHECK(emit_plot_data(series, PlotKind::rv_line).rows.size() == rv.days.size());
    CHECK_THROWS_AS(emit_plot_data(rv, PlotKind::monthly_box), std::invalid_argument);

    CHECK(parse_plot_kind("rv_line") == PlotKind::rv_line);
    CHECK(plot_kind_name(PlotKind::monthly_box) == "monthly_box");
    CHECK_THROWS_AS(parse_plot_kind("pie"), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
    RngStream rng(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(27000) == "27000");
}
