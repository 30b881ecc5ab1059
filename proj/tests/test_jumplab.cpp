#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "fbns/jumplab.hpp"
#include "fbns/rng.hpp"

using namespace fbns;

namespace {

// Random walk with occasional large moves in both directions.
std::vector<double> random_series(RngStream& rng, std::size_t n) {
    std::vector<double> e(n);
    e[0] = 100;
    for (std::size_t k = 1; k < n; ++k) {
        double step = 0.0006 * rng.normal();
        if (rng.uniform() < 0.05) {
            step += (rng.uniform() < 0.7 ? -1 : 1) * 0.003 * rng.uniform();
        }
        e[k] = e[k - 1] * std::exp(step);
    }
    return e;
}

std::vector<double> flat_with_drops(std::size_t n, const std::vector<std::size_t>& at, double pct) {
    std::vector<double> e(n, 100.0);
    double level = 100.0;
    for (std::size_t k = 1; k < n; ++k) {
        if (std::find(at.begin(), at.end(), k) != at.end()) {
            level *= 1 - pct / 100;
        }
        e[k] = level;
    }
    return e;
}

// Independent label rule: scan the raw expectations.
int brute_label(const std::vector<double>& e, std::size_t end, const LabelingConfig& c) {
    std::size_t hits = 0;
    for (std::size_t k = end + 1; k <= end + c.lookahead; ++k) {
        const double move = 100 * (e[k - 1] - e[k]) / e[k - 1];
        const bool hit = c.direction == JumpDirection::down ? move >= c.K : std::abs(move) >= c.K;
        hits += hit;
    }
    return hits >= c.min_jumps ? 1 : 0;
}

}  // namespace

TEST_CASE("detect_big_jumps examples") {
    CHECK(detect_big_jumps(std::vector<double>{100, 100, 100}, 0.1).empty());
    const auto ev = detect_big_jumps(std::vector<double>{100, 99.89, 99.89}, 0.1);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].index == 1);
    CHECK_THAT(ev[0].drop_pct, Catch::Matchers::WithinAbs(0.11, 1e-9));
    std::vector<double> rising(50);
    for (std::size_t k = 0; k < rising.size(); ++k) {
        rising[k] = 100 + static_cast<double>(k);
    }
    CHECK(detect_big_jumps(rising, 0.001).empty());
    CHECK(detect_big_jumps(rising, 0.001, JumpDirection::absolute).size() == 49);
    CHECK_THROWS_AS(detect_big_jumps(rising, 0.0), std::domain_error);
}

TEST_CASE("jump counts against planted drops") {
    const auto e = flat_with_drops(500, {40, 200, 377}, 0.2);
    const double Ks[] = {0.01, 0.1, 0.1, 0.3, 50};
    const SplitSpec splits[] = {{"A", {1, 100}, {101, 250}}, {"B", {300, 350}, {351, 499}}};
    const auto table = jump_count_table(e, Ks, splits);
    REQUIRE(table.rows.size() == 5);
    CHECK(table.rows[0].total == 3);
    CHECK(table.rows[1].total == 3);
    CHECK(table.rows[2].total == 3);
    CHECK(table.rows[3].total == 0);
    CHECK(table.rows[4].total == 0);
    CHECK(table.rows[1].per_split == std::vector<std::size_t>{2, 1});
    CHECK(table.split_names == std::vector<std::string>{"A", "B"});

    std::ostringstream out;
    write_jump_count_table(out, table);
    CHECK(out.str().rfind("K,jump_number,jump_number_A,jump_number_B\n", 0) == 0);
}

TEST_CASE("events are nested in K") {
    RngStream rng(17, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto e = random_series(rng, 2000);
        const double Ks[] = {0.01, 0.03, 0.05, 0.1, 0.15, 0.3, 0.5, 1.0};
        std::vector<JumpEvent> prev;
        for (double K : Ks) {
            const auto ev = detect_big_jumps(e, K);
            if (K != Ks[0]) {
                REQUIRE(std::includes(prev.begin(), prev.end(), ev.begin(), ev.end(),
                                      [](const JumpEvent& a, const JumpEvent& b) { return a.index < b.index; }));
            }
            prev = ev;
        }
        const auto table = jump_count_table(e, Ks);
        for (std::size_t i = 1; i < table.rows.size(); ++i) {
            REQUIRE(table.rows[i].total <= table.rows[i - 1].total);
        }
    }
}

TEST_CASE("split validation") {
    CHECK_NOTHROW(SplitSpec{"T", {1, 10}, {11, 20}}.validate(21));
    CHECK_THROWS_AS(SplitSpec({"T", {1, 10}, {11, 21}}).validate(21), std::domain_error);
    CHECK_THROWS_AS(SplitSpec({"T", {1, 10}, {10, 20}}).validate(21), std::domain_error);
    CHECK_THROWS_AS(SplitSpec({"T", {10, 1}, {11, 20}}).validate(21), std::domain_error);
    CHECK_THROWS_AS(SplitSpec({"T", {11, 20}, {1, 10}}).validate(21), std::domain_error);
}

TEST_CASE("build_dataset examples") {
    LabelingConfig c;
    c.window = 4;
    c.lookahead = 3;
    c.min_jumps = 2;

    const auto one = build_dataset(std::vector<double>(8, 100.0), c);
    REQUIRE(one.size() == 1);
    CHECK(one.row_start[0] == 1);
    CHECK(one.labels[0] == 0);
    CHECK_THROWS_AS(build_dataset(std::vector<double>(7, 100.0), c), std::domain_error);

    // Rows cover bars [1,4], [5,8], [9,12]; lookaheads (4,7], (8,11], (12,15].
    const auto two = build_dataset(flat_with_drops(16, {9, 11}, 0.2), c);
    REQUIRE(two.size() == 3);
    CHECK(two.labels == std::vector<int>{0, 1, 0});
    CHECK(two.rows[2][0] < 0);

    c.min_jumps = 1;
    const auto single = build_dataset(flat_with_drops(16, {6}, 0.2), c);
    CHECK(single.labels == std::vector<int>{1, 0, 0});
    c.min_jumps = 2;
    CHECK(build_dataset(flat_with_drops(16, {6}, 0.2), c).labels == std::vector<int>{0, 0, 0});

    c.mode = WindowMode::sliding;
    const auto slide = build_dataset(flat_with_drops(16, {9, 11}, 0.2), c);
    CHECK(slide.size() == 16 - 4 - 3);
    for (std::size_t r = 0; r < slide.size(); ++r) {
        CHECK(slide.row_start[r] == r + 1);
    }
}

TEST_CASE("labels match brute-force recounts") {
    RngStream rng(23, 0);
    std::size_t checked = 0;
    for (int rep = 0; rep < 300; ++rep) {
        LabelingConfig c;
        c.K = 0.05 + 0.2 * rng.uniform();
        c.window = 1 + rng.below(15);
        c.lookahead = 1 + rng.below(15);
        c.min_jumps = 1 + rng.below(3);
        c.mode = rng.below(2) ? WindowMode::sliding : WindowMode::stacked;
        c.direction = rng.below(2) ? JumpDirection::absolute : JumpDirection::down;
        const auto e = random_series(rng, c.window + c.lookahead + 1 + rng.below(400));
        const auto ds = build_dataset(e, c);
        for (std::size_t r = 0; r < ds.size(); ++r) {
            REQUIRE(ds.labels[r] == brute_label(e, ds.row_end(r), c));
            for (std::size_t j = 0; j < c.window; ++j) {
                const std::size_t k = ds.row_start[r] + j;
                REQUIRE(ds.rows[r][j] == 100.0 * (e[k] - e[k - 1]) / e[k - 1]);
            }
            ++checked;
        }
        const std::size_t stride = c.mode == WindowMode::stacked ? c.window : 1;
        REQUIRE(ds.size() == (e.size() - 1 - c.window - c.lookahead) / stride + 1);
    }
    CHECK(checked > 1000);
}

TEST_CASE("split assigns whole windows") {
    RngStream rng(5, 5);
    const auto e = random_series(rng, 1200);
    LabelingConfig c;
    const auto ds = build_dataset(e, c);
    const SplitSpec t2{"T2", {357, 902}, {903, 1175}};
    t2.validate(e.size());
    const auto [train, test] = split(ds, t2);
    std::set<std::size_t> tr(train.row_start.begin(), train.row_start.end());
    std::set<std::size_t> te(test.row_start.begin(), test.row_start.end());
    std::set<std::size_t> all(ds.row_start.begin(), ds.row_start.end());
    CHECK(train.size() > 0);
    CHECK(test.size() > 0);
    for (auto s : tr) {
        CHECK(te.count(s) == 0);
        CHECK(all.count(s) == 1);
        CHECK(s >= 357);
        CHECK(s + c.window - 1 <= 902);
    }
    for (auto s : te) {
        CHECK(all.count(s) == 1);
        CHECK(s >= 903);
        CHECK(s + c.window - 1 <= 1175);
    }
    CHECK(*tr.rbegin() + c.window <= *te.begin());
    // Enumerated: starts 1 + 10r inside each range.
    std::size_t expect_train = 0, expect_test = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        expect_train += t2.train.contains(ds.row_start[r]) && t2.train.contains(ds.row_end(r));
        expect_test += t2.test.contains(ds.row_start[r]) && t2.test.contains(ds.row_end(r));
    }
    CHECK(train.size() == expect_train);
    CHECK(test.size() == expect_test);
    // Window [351, 360] straddles the train start.
    CHECK(tr.count(351) == 0);
    CHECK(tr.count(361) == 1);

    const auto [everything, none] = split(ds, {"all", {1, 1188}, {1189, 1199}});
    CHECK(everything.size() == ds.size());
    CHECK(none.size() == 0);
}

TEST_CASE("dataset csv round-trip and determinism") {
    RngStream rng(9, 9);
    const auto e = random_series(rng, 800);
    LabelingConfig c;
    c.window = 7;
    const auto ds = build_dataset(e, c);
    CHECK(build_dataset(e, c) == ds);
    std::ostringstream out;
    write_dataset_csv(out, ds);
    CHECK(out.str().rfind("row_start,f1,f2,f3,f4,f5,f6,f7,label\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_dataset_csv(in, c) == ds);
}
