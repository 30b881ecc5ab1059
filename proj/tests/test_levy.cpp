#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fbns/levy.hpp"
#include "fbns/numeric.hpp"

using namespace fbns;
using Catch::Matchers::WithinAbs;

namespace {

struct Sample {
    double mean;
    double stderr_;
};

Sample summarize(const std::vector<double>& v) {
    return {mean(v), std::sqrt(sample_variance(v) / static_cast<double>(v.size()))};
}

}  // namespace

TEST_CASE("spec validation and moments") {
    CHECK_THROWS_AS(SubordinatorSpec({0.0, 1.0, 1.0}).validate(), std::domain_error);
    CHECK_THROWS_AS(SubordinatorSpec({1.0, 0.0, 1.0}).validate(), std::domain_error);
    CHECK_THROWS_AS(SubordinatorSpec({1.0, 1.0, 0.5}).validate(), std::domain_error);
    CHECK_NOTHROW(SubordinatorSpec::jumpless().validate());

    auto m = levy_moments({1, 1, 1});
    CHECK((m.mean_rate == 1 && m.var_rate == 2));
    m = levy_moments({2, 2, 1});
    CHECK((m.mean_rate == 1 && m.var_rate == 1));
    m = levy_moments({1.5, 2.0, 3.0});
    CHECK_THAT(m.mean_rate, WithinAbs(3 * 1.5 / 2.0, 1e-15));
    CHECK_THAT(m.var_rate, WithinAbs(6 * 1.5 / 4.0, 1e-15));
}

TEST_CASE("unit increments match levy_moments") {
    for (const SubordinatorSpec spec : {SubordinatorSpec{1, 1, 1}, SubordinatorSpec{2, 2, 1}}) {
        RngStream rng(101, 0);
        std::vector<double> inc(100000);
        for (auto& x : inc) {
            x = simulate_subordinator(spec, 1.0, 1.0, 0.0, rng).core_mass();
        }
        const auto m = levy_moments(spec);
        const auto s = summarize(inc);
        CHECK(std::abs(s.mean - m.mean_rate) < 3 * s.stderr_);
        // Standard error of the sample variance from the fourth central moment.
        std::vector<double> dev2(inc.size());
        for (std::size_t i = 0; i < inc.size(); ++i) {
            dev2[i] = (inc[i] - s.mean) * (inc[i] - s.mean);
        }
        const auto v = summarize(dev2);
        CHECK(std::abs(sample_variance(inc) - m.var_rate) < 3 * v.stderr_);
    }
}

TEST_CASE("simulate_subordinator") {
    RngStream rng(7, 1);
    CHECK(simulate_subordinator(SubordinatorSpec::jumpless(), 1.0, 10.0, 0.0, rng).size() == 0);
    CHECK_THROWS_AS(simulate_subordinator({1, 1, 1}, 0.0, 1.0, 0.0, rng), std::domain_error);
    CHECK_THROWS_AS(simulate_subordinator({1, 1, 1}, 1.0, 0.0, 0.0, rng), std::domain_error);
    CHECK_THROWS_AS(simulate_subordinator({1, 1, 1}, 1.0, 1.0, 1.0, rng), std::domain_error);

    SECTION("Poisson count oracle") {
        std::vector<double> counts;
        for (int r = 0; r < 200; ++r) {
            counts.push_back(static_cast<double>(simulate_subordinator({1, 1, 1}, 1.0, 1000.0, 0.0, rng).size()));
        }
        CHECK(std::abs(mean(counts) - 1000.0) < 3 * std::sqrt(1000.0));
    }
    SECTION("compound Poisson mean mass") {
        std::vector<double> mass;
        for (int r = 0; r < 200; ++r) {
            mass.push_back(simulate_subordinator({2, 4, 1}, 0.5, 100.0, 0.0, rng).core_mass());
        }
        const auto s = summarize(mass);
        CHECK(std::abs(s.mean - 25.0) < 3 * s.stderr_);
    }
    SECTION("path invariants and determinism") {
        RngStream a(99, 3), b(99, 3);
        const auto p = simulate_subordinator({1, 2, 4}, 1.5, 20.0, 0.1, a);
        CHECK(p == simulate_subordinator({1, 2, 4}, 1.5, 20.0, 0.1, b));
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p.times[i] > 0.0);
            CHECK(p.times[i] <= 20.0);
            if (i > 0) {
                CHECK(p.times[i] > p.times[i - 1]);
            }
            CHECK(p.marks[i].lower() >= 0.0);
            CHECK(p.marks[i].lower() == p.marks[i].core() * 0.9);
            CHECK(!p.marks[i].is_crisp());
        }
        RngStream c(99, 3);
        for (const auto& m : simulate_subordinator({1, 2, 4}, 1.5, 20.0, 0.0, c).marks) {
            CHECK(m.is_crisp());
        }
    }
}

TEST_CASE("superpose") {
    RngStream r1(1, 1), r2(1, 2);
    const auto z1 = simulate_subordinator({1, 1, 1}, 1.0, 50.0, 0.05, r1);
    const auto z2 = simulate_subordinator({1, 1, 1}, 1.0, 50.0, 0.05, r2);
    CHECK(superpose(z1, z2, 1.0) == z1);
    CHECK(superpose(z1, z2, 0.0) == z2);
    CHECK_THROWS_AS(superpose(z1, z2, 1.1), std::domain_error);
    auto other = z2;
    other.lambda = 2.0;
    CHECK_THROWS_AS(superpose(z1, other, 0.5), std::domain_error);

    const auto mixed = superpose(z1, z2, 0.6);
    CHECK(mixed.size() == z1.size() + z2.size());
    CHECK(std::is_sorted(mixed.times.begin(), mixed.times.end()));
    for (const auto& m : mixed.marks) {
        CHECK(m.lower() >= 0.0);
    }
    CHECK_THAT(mixed.core_mass(), WithinAbs(0.6 * z1.core_mass() + 0.8 * z2.core_mass(), 1e-9));
}

TEST_CASE("superposition preserves the unit-increment variance") {
    const SubordinatorSpec spec{1, 1, 1};
    const double v = levy_moments(spec).var_rate;
    const double rp = 0.6;
    RngStream a(5, 1), b(5, 2);
    std::vector<double> inc(10000);
    for (auto& x : inc) {
        x = superpose(simulate_subordinator(spec, 1, 1, 0, a), simulate_subordinator(spec, 1, 1, 0, b), rp).core_mass();
    }
    const double m = mean(inc);
    std::vector<double> dev2(inc.size());
    for (std::size_t i = 0; i < inc.size(); ++i) {
        dev2[i] = (inc[i] - m) * (inc[i] - m);
    }
    const double se = std::sqrt(sample_variance(dev2) / inc.size());
    CHECK(std::abs(sample_variance(inc) - v) < 3 * se);
}

TEST_CASE("convex_combine") {
    RngStream r1(2, 1), r2(2, 2);
    const auto z = simulate_subordinator({1, 1, 1}, 1.0, 30.0, 0.05, r1);
    const auto zb = simulate_subordinator({1, 1, 4}, 1.0, 30.0, 0.05, r2);
    CHECK(convex_combine(z, zb, 0.0) == z);
    CHECK(convex_combine(z, zb, 1.0) == zb);
    CHECK_THROWS_AS(convex_combine(z, zb, -0.1), std::domain_error);
    CHECK_THROWS_AS(convex_combine(z, zb, ThetaSchedule::alternating(1, 1, 10)), std::domain_error);

    const auto alt = convex_combine(z, zb, ThetaSchedule::alternating(1.0, 1.0, 30.0));
    for (std::size_t i = 0; i < alt.size(); ++i) {
        const bool big_block = static_cast<int>(std::floor(alt.times[i])) % 2 == 0;
        const auto& src = big_block ? zb : z;
        const auto it = std::find(src.times.begin(), src.times.end(), alt.times[i]);
        REQUIRE(it != src.times.end());
        CHECK(alt.marks[i] == src.marks[it - src.times.begin()]);
    }

    SECTION("linearity of means") {
        RngStream a(3, 1), b(3, 2);
        std::vector<double> inc(20000);
        for (auto& x : inc) {
            x = convex_combine(simulate_subordinator({1, 1, 1}, 1, 1, 0, a), simulate_subordinator({1, 1, 4}, 1, 1, 0, b),
                               0.5)
                    .core_mass();
        }
        const double expected = 0.5 * 1.0 + 0.5 * 4.0;
        CHECK(std::abs(mean(inc) - expected) < 3 * std::sqrt(sample_variance(inc) / inc.size()));
    }
}

TEST_CASE("theta schedules") {
    const auto alt = ThetaSchedule::alternating(1.0, 1.0, 4.0);
    CHECK(alt.at(0.0) == 1.0);
    CHECK(alt.at(0.999) == 1.0);
    CHECK(alt.at(1.0) == 0.0);
    CHECK(alt.at(2.5) == 1.0);
    CHECK(alt.at(4.0) == 0.0);
    CHECK_THROWS_AS(alt.at(4.01), std::domain_error);
    CHECK(alt.integrate(4.0, [](double th) { return th; }) == 2.0);
    CHECK(alt.integrate(2.5, [](double th) { return th * th; }) == 1.5);
    CHECK_THROWS_AS(ThetaSchedule::steps({{0.5, 0.1}}), std::domain_error);
    CHECK_THROWS_AS(ThetaSchedule::steps({{0.0, 1.5}}), std::domain_error);
    CHECK_THROWS_AS(ThetaSchedule::steps({{0.0, 0.1}, {0.0, 0.2}}), std::domain_error);
    CHECK(ThetaSchedule::constant(0.3).at(1e9) == 0.3);
}
