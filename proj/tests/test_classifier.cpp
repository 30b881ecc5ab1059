#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "fbns/classifier.hpp"
#include "fbns/rng.hpp"

using namespace fbns;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using Confusion = std::array<std::array<std::size_t, 2>, 2>;

double round2(double x) {
    return std::round(x * 100) / 100;
}

struct Labeled {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

// Linearly separable with a margin: label 1 iff w.x > 0, points near the plane removed.
Labeled separable(RngStream& rng, std::size_t n, std::size_t width) {
    std::vector<double> w(width);
    for (std::size_t j = 0; j < width; ++j) {
        w[j] = j % 2 ? 1.0 : -0.5;
    }
    Labeled d;
    while (d.x.size() < n) {
        std::vector<double> row(width);
        double dot = 0;
        for (std::size_t j = 0; j < width; ++j) {
            row[j] = rng.normal();
            dot += w[j] * row[j];
        }
        if (std::abs(dot) < 0.5) {
            continue;
        }
        d.x.push_back(row);
        d.y.push_back(dot > 0);
    }
    return d;
}

std::vector<int> expand(const Confusion& c, bool predictions) {
    std::vector<int> out;
    for (int t = 0; t < 2; ++t) {
        for (int p = 0; p < 2; ++p) {
            out.insert(out.end(), c[t][p], predictions ? p : t);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("config validation") {
    NetConfig c;
    CHECK_NOTHROW(c.validate());
    c.hidden_layers = {4, 0};
    CHECK_THROWS_AS(c.validate(), std::domain_error);
    c = NetConfig{};
    c.momentum = 1.0;
    CHECK_THROWS_AS(c.validate(), std::domain_error);
    c = NetConfig{};
    c.threshold = 1.0;
    CHECK_THROWS_AS(c.validate(), std::domain_error);
}

TEST_CASE("analytic gradient matches finite differences") {
    RngStream rng(41, 0);
    for (int cfg = 0; cfg < 10; ++cfg) {
        const std::size_t width = 2 + rng.below(6);
        std::vector<std::size_t> hidden;
        for (std::size_t l = 0, n = 1 + rng.below(2); l < n; ++l) {
            hidden.push_back(2 + rng.below(5));
        }
        const auto act = cfg % 2 ? Activation::logistic : Activation::rectifier;
        Network net(width, hidden, act);
        RngStream init = rng.derive(static_cast<std::uint64_t>(cfg));
        net.initialise(init);
        auto params = net.parameters();
        for (auto& p : params) {
            p += 0.05 * rng.normal();  // nonzero biases keep rectifiers away from kinks
        }
        net.set_parameters(params);

        const std::size_t n = 12;
        std::vector<std::vector<double>> x(n, std::vector<double>(width));
        std::vector<int> y(n);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x[i]) {
                v = rng.normal();
            }
            y[i] = static_cast<int>(rng.below(2));
            w[i] = 0.5 + rng.uniform();
        }
        const double l2 = 0.01 * rng.uniform();
        std::vector<double> grad;
        (void)net.loss_and_gradient(x, y, w, l2, &grad);
        REQUIRE(grad.size() == params.size());

        const double h = 1e-5;
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto plus = params;
            auto minus = params;
            plus[k] += h;
            minus[k] -= h;
            Network a = net, b = net;
            a.set_parameters(plus);
            b.set_parameters(minus);
            const double fd = (a.loss_and_gradient(x, y, w, l2, nullptr) - b.loss_and_gradient(x, y, w, l2, nullptr)) /
                              (2 * h);
            INFO("config " << cfg << " parameter " << k);
            REQUIRE(std::abs(grad[k] - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3));
        }
    }
}

TEST_CASE("zero network sits on the threshold") {
    const Network net(3, {4}, Activation::rectifier);
    const std::vector<double> x{1.0, -2.0, 0.5};
    CHECK(net.probability(x) == 0.5);
    TrainedModel m;
    m.input_width = 3;
    m.norm.kept = {0, 1, 2};
    m.norm.mean = {0, 0, 0};
    m.norm.stdev = {1, 1, 1};
    m.network = net;
    const auto p = predict(m, x);
    CHECK(p.probability == 0.5);
    CHECK(p.label == 1);
}

TEST_CASE("separable data is learned") {
    RngStream rng(3, 1);
    const auto data = separable(rng, 2000, 10);
    const Labeled train_set{{data.x.begin(), data.x.begin() + 1500}, {data.y.begin(), data.y.begin() + 1500}};
    const Labeled test_set{{data.x.begin() + 1500, data.x.end()}, {data.y.begin() + 1500, data.y.end()}};
    NetConfig cfg;
    cfg.epochs = 30;
    const auto model = train(train_set.x, train_set.y, cfg);
    CHECK_FALSE(model.degenerate);
    CHECK(model.loss_history.size() == cfg.epochs + 1);
    CHECK(model.loss_history.back() < model.loss_history.front());
    const auto pred = predicted_labels(predict(model, test_set.x));
    const auto report = classification_report(pred, test_set.y);
    CHECK(report.accuracy >= 0.9);

    // Deep inside the class-1 half space.
    std::vector<double> far(10);
    for (std::size_t j = 0; j < 10; ++j) {
        far[j] = j % 2 ? 3.0 : -1.5;
    }
    CHECK(predict(model, far).probability > 0.9);

    CHECK(train(train_set.x, train_set.y, cfg) == model);
}

TEST_CASE("degenerate training sets") {
    std::vector<std::vector<double>> x{{1, 2}, {3, 4}, {5, 6}};
    const std::vector<int> zeros{0, 0, 0};
    const auto m0 = train(x, zeros, NetConfig{});
    CHECK(m0.degenerate);
    for (const auto& row : x) {
        const auto p = predict(m0, row);
        CHECK(p.label == 0);
        CHECK(p.probability < 0.5);
    }
    const std::vector<int> ones{1, 1, 1};
    const auto m1 = train(x, ones, NetConfig{});
    CHECK(m1.degenerate);
    CHECK(predict(m1, x[0]).label == 1);
    CHECK_THROWS_AS(train({{1.0}}, std::vector<int>{0}, NetConfig{}), std::domain_error);
    CHECK_THROWS_AS(train({{1.0}, {1.0, 2.0}}, std::vector<int>{0, 1}, NetConfig{}), std::domain_error);
}

TEST_CASE("constant feature columns are dropped") {
    RngStream rng(6, 6);
    auto data = separable(rng, 200, 4);
    for (auto& row : data.x) {
        row.push_back(7.0);
    }
    NetConfig cfg;
    cfg.epochs = 5;
    const auto m = train(data.x, data.y, cfg);
    CHECK(m.norm.dropped == std::vector<std::size_t>{4});
    CHECK(m.network.input_width() == 4);
    CHECK(m.input_width == 5);
}

TEST_CASE("report examples") {
    const std::vector<int> labels{0, 1, 1, 0, 1};
    const auto perfect = classification_report(labels, labels);
    for (const auto& c : perfect.classes) {
        CHECK((c.precision == 1 && c.recall == 1 && c.f1 == 1));
    }
    CHECK(perfect.accuracy == 1);

    const auto single = classification_report(std::vector<int>{1}, std::vector<int>{1});
    CHECK(single.classes[1].precision == 1);
    CHECK(single.classes[1].recall == 1);
    CHECK(single.classes[0].support == 0);

    // All predicted 1 on 8 zeros and 27 ones.
    const Confusion all_one{{{0, 8}, {0, 27}}};
    const auto r = classification_report(expand(all_one, true), expand(all_one, false));
    CHECK_THAT(r.classes[1].precision, WithinRel(27.0 / 35.0, 1e-15));
    CHECK(r.classes[1].recall == 1.0);
    CHECK(r.classes[0] == ClassMetrics{0, 0, 0, 8});
    CHECK(r.classes[1].support == 27);
    CHECK(r.confusion == all_one);

    CHECK_THROWS_AS(classification_report(std::vector<int>{1, 0}, std::vector<int>{1}), std::domain_error);
    CHECK_THROWS_AS(classification_report(std::vector<int>{}, std::vector<int>{}), std::domain_error);
    CHECK_THROWS_AS(classification_report(std::vector<int>{2}, std::vector<int>{1}), std::domain_error);
}

TEST_CASE("published report patterns") {
    struct Case {
        Confusion confusion;
        std::array<double, 6> rounded;  // p0 r0 f0 p1 r1 f1
        std::array<std::size_t, 2> support;
        int theta;
    };
    const Case cases[] = {
        {{{{0, 8}, {1, 26}}}, {0.00, 0.00, 0.00, 0.76, 0.96, 0.85}, {8, 27}, 1},
        {{{{0, 8}, {3, 24}}}, {0.00, 0.00, 0.00, 0.75, 0.89, 0.81}, {8, 27}, 1},
        {{{{19, 0}, {16, 0}}}, {0.54, 1.00, 0.70, 0.00, 0.00, 0.00}, {19, 16}, 0},
        {{{{18, 1}, {16, 0}}}, {0.53, 0.95, 0.68, 0.00, 0.00, 0.00}, {19, 16}, 0},
    };
    for (const auto& c : cases) {
        const auto r = report_from_confusion(c.confusion);
        CHECK(round2(r.classes[0].precision) == c.rounded[0]);
        CHECK(round2(r.classes[0].recall) == c.rounded[1]);
        CHECK(round2(r.classes[0].f1) == c.rounded[2]);
        CHECK(round2(r.classes[1].precision) == c.rounded[3]);
        CHECK(round2(r.classes[1].recall) == c.rounded[4]);
        CHECK(round2(r.classes[1].f1) == c.rounded[5]);
        CHECK(r.classes[0].support == c.support[0]);
        CHECK(r.classes[1].support == c.support[1]);
        CHECK(estimate_theta(r).theta == c.theta);
        CHECK(estimate_theta(r, ThetaRule::majority_class).theta == c.theta);
        CHECK(classification_report(expand(c.confusion, true), expand(c.confusion, false)) == r);
    }
    const auto text = format_report(report_from_confusion(cases[0].confusion), "T1");
    CHECK(text.find("theta=1         0.76      0.96      0.85        27") != std::string::npos);
    CHECK(text.find("theta=0         0.00      0.00      0.00         8") != std::string::npos);
}

TEST_CASE("theta tie rules") {
    const auto balanced = report_from_confusion({{{1, 1}, {1, 1}}});
    CHECK(estimate_theta(balanced).theta == 0);
    CHECK(estimate_theta(balanced, ThetaRule::majority_class).theta == 0);
    const auto e = estimate_theta(report_from_confusion({{{0, 8}, {1, 26}}}));
    CHECK(e.f1_class0 == 0.0);
    CHECK(e.predicted_class1 == 34);
}

TEST_CASE("report properties on random predictions") {
    RngStream rng(12, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<int> pred(n), lab(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = static_cast<int>(rng.below(2));
            lab[i] = static_cast<int>(rng.below(2));
        }
        const auto r = classification_report(pred, lab);
        REQUIRE(r.total() == n);
        REQUIRE(r.accuracy == static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / static_cast<double>(n));
        for (int c = 0; c < 2; ++c) {
            const double tp = static_cast<double>(r.confusion[c][c]);
            const double fp = static_cast<double>(r.confusion[1 - c][c]);
            const double fn = static_cast<double>(r.confusion[c][1 - c]);
            const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
            const double rc = tp + fn > 0 ? tp / (tp + fn) : 0.0;
            REQUIRE(r.classes[c].precision == p);
            REQUIRE(r.classes[c].recall == rc);
            REQUIRE_THAT(r.classes[c].f1, WithinAbs(p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0, 1e-15));
        }

        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            idx[i] = i;
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        std::vector<int> sp(n), sl(n), fp(n), fl(n);
        for (std::size_t i = 0; i < n; ++i) {
            sp[i] = pred[idx[i]];
            sl[i] = lab[idx[i]];
            fp[i] = 1 - pred[i];
            fl[i] = 1 - lab[i];
        }
        REQUIRE(classification_report(sp, sl) == r);
        const auto f = classification_report(fp, fl);
        REQUIRE(f.classes[0] == r.classes[1]);
        REQUIRE(f.classes[1] == r.classes[0]);
        REQUIRE(f.accuracy == r.accuracy);
    }
}
