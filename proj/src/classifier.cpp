#include "fbns/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "fbns/numeric.hpp"

namespace fbns {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double activate(Activation a, double z) { return a == Activation::rectifier ? std::max(z, 0.0) : sigmoid(z); }

// Derivative expressed through the pre-activation z and the activation value h.
double activate_prime(Activation a, double z, double h) {
    return a == Activation::rectifier ? (z > 0.0 ? 1.0 : 0.0) : h * (1.0 - h);
}

void check_binary(std::span<const int> v, const char* what) {
    for (int c : v) {
        if (c != 0 && c != 1) {
            throw std::domain_error(fmt::format("{} must be 0 or 1, got {}", what, c));
        }
    }
}

}  // namespace

void NetConfig::validate() const {
    if (std::any_of(hidden_layers.begin(), hidden_layers.end(), [](std::size_t s) { return s == 0; })) {
        throw std::domain_error("hidden layer sizes must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::domain_error("learning_rate must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::domain_error("momentum must lie in [0, 1)");
    }
    if (epochs == 0 || batch_size == 0) {
        throw std::domain_error("epochs and batch_size must be positive");
    }
    if (!(l2 >= 0.0) || !std::isfinite(l2)) {
        throw std::domain_error("l2 must be non-negative");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::domain_error("threshold must lie in (0, 1)");
    }
}

Network::Network(std::size_t input_width, const std::vector<std::size_t>& hidden, Activation activation)
    : activation_(activation) {
    std::size_t in = input_width;
    for (std::size_t h : hidden) {
        layers_.push_back({in, h, std::vector<double>(in * h, 0.0), std::vector<double>(h, 0.0)});
        in = h;
    }
    layers_.push_back({in, 1, std::vector<double>(in, 0.0), std::vector<double>(1, 0.0)});
}

void Network::initialise(RngStream& rng) {
    for (auto& layer : layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        for (auto& w : layer.weights) {
            w = limit * (2.0 * rng.uniform() - 1.0);
        }
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
    }
}

std::size_t Network::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += l.weights.size() + l.biases.size();
    }
    return n;
}

std::vector<double> Network::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& l : layers_) {
        flat.insert(flat.end(), l.weights.begin(), l.weights.end());
        flat.insert(flat.end(), l.biases.begin(), l.biases.end());
    }
    return flat;
}

void Network::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw std::domain_error("parameter vector has the wrong length");
    }
    std::size_t k = 0;
    for (auto& l : layers_) {
        for (auto& w : l.weights) {
            w = flat[k++];
        }
        for (auto& b : l.biases) {
            b = flat[k++];
        }
    }
}

double Network::logit(std::span<const double> x) const {
    if (x.size() != input_width()) {
        throw std::domain_error(fmt::format("expected {} features, got {}", input_width(), x.size()));
    }
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const auto& l = layers_[li];
        const bool output = li + 1 == layers_.size();
        next.assign(l.outputs, 0.0);
        for (std::size_t o = 0; o < l.outputs; ++o) {
            double z = l.biases[o];
            for (std::size_t i = 0; i < l.inputs; ++i) {
                z += l.weights[o * l.inputs + i] * a[i];
            }
            next[o] = output ? z : activate(activation_, z);
        }
        a.swap(next);
    }
    return a[0];
}

double Network::probability(std::span<const double> x) const { return sigmoid(logit(x)); }

double Network::loss_and_gradient(const std::vector<std::vector<double>>& x, std::span<const int> y,
                                  std::span<const double> sample_weights, double l2,
                                  std::vector<double>* gradient) const {
    if (x.size() != y.size() || x.size() != sample_weights.size() || x.empty()) {
        throw std::domain_error("loss needs equally many rows, labels and weights");
    }
    const double weight_total = pairwise_sum(sample_weights);
    if (!(weight_total > 0.0)) {
        throw std::domain_error("sample weights must have a positive total");
    }
    if (gradient) {
        gradient->assign(parameter_count(), 0.0);
    }
    // Offsets of each layer's weights and biases in the flat vector.
    std::vector<std::size_t> w_off(layers_.size()), b_off(layers_.size());
    std::size_t off = 0;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        w_off[li] = off;
        off += layers_[li].weights.size();
        b_off[li] = off;
        off += layers_[li].biases.size();
    }

    std::vector<double> losses(x.size());
    std::vector<std::vector<double>> z(layers_.size()), h(layers_.size() + 1);
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n].size() != input_width()) {
            throw std::domain_error("feature width mismatch");
        }
        h[0] = x[n];
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            const auto& l = layers_[li];
            const bool output = li + 1 == layers_.size();
            z[li].assign(l.outputs, 0.0);
            h[li + 1].assign(l.outputs, 0.0);
            for (std::size_t o = 0; o < l.outputs; ++o) {
                double s = l.biases[o];
                for (std::size_t i = 0; i < l.inputs; ++i) {
                    s += l.weights[o * l.inputs + i] * h[li][i];
                }
                z[li][o] = s;
                h[li + 1][o] = output ? s : activate(activation_, s);
            }
        }
        const double out = z.back()[0];
        const double w = sample_weights[n] / weight_total;
        losses[n] = w * (softplus(out) - y[n] * out);
        if (!gradient) {
            continue;
        }
        std::vector<double> delta{w * (sigmoid(out) - y[n])};
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const auto& l = layers_[li];
            auto& g = *gradient;
            for (std::size_t o = 0; o < l.outputs; ++o) {
                for (std::size_t i = 0; i < l.inputs; ++i) {
                    g[w_off[li] + o * l.inputs + i] += delta[o] * h[li][i];
                }
                g[b_off[li] + o] += delta[o];
            }
            if (li == 0) {
                break;
            }
            std::vector<double> prev(l.inputs, 0.0);
            for (std::size_t i = 0; i < l.inputs; ++i) {
                double s = 0.0;
                for (std::size_t o = 0; o < l.outputs; ++o) {
                    s += l.weights[o * l.inputs + i] * delta[o];
                }
                prev[i] = s * activate_prime(activation_, z[li - 1][i], h[li][i]);
            }
            delta.swap(prev);
        }
    }
    double penalty = 0.0;
    if (l2 > 0.0) {
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            for (std::size_t k = 0; k < layers_[li].weights.size(); ++k) {
                const double wk = layers_[li].weights[k];
                penalty += wk * wk;
                if (gradient) {
                    (*gradient)[w_off[li] + k] += l2 * wk;
                }
            }
        }
    }
    return pairwise_sum(losses) + 0.5 * l2 * penalty;
}

std::vector<double> FeatureNorm::apply(std::span<const double> row) const {
    std::vector<double> out(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        out[j] = (row[kept[j]] - mean[j]) / stdev[j];
    }
    return out;
}

TrainedModel train(const std::vector<std::vector<double>>& x, std::span<const int> y, const NetConfig& config) {
    config.validate();
    if (x.size() != y.size()) {
        throw std::domain_error("rows and labels differ in length");
    }
    if (x.size() < 2) {
        throw std::domain_error("training needs at least two rows");
    }
    check_binary(y, "labels");
    const std::size_t width = x.front().size();
    for (const auto& row : x) {
        if (row.size() != width) {
            throw std::domain_error("training rows differ in width");
        }
        if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            throw std::domain_error("training features must be finite");
        }
    }

    TrainedModel model;
    model.config = config;
    model.input_width = width;

    const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (ones == 0 || ones == y.size()) {
        model.degenerate = true;
        model.constant_class = ones == 0 ? 0 : 1;
        return model;
    }

    std::vector<double> column(x.size());
    for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t n = 0; n < x.size(); ++n) {
            column[n] = x[n][j];
        }
        const double m = mean(column);
        const double sd = std::sqrt(sample_variance(column));
        if (sd > 0.0) {
            model.norm.kept.push_back(j);
            model.norm.mean.push_back(m);
            model.norm.stdev.push_back(sd);
        } else {
            model.norm.dropped.push_back(j);
        }
    }

    std::vector<std::vector<double>> xs;
    xs.reserve(x.size());
    for (const auto& row : x) {
        xs.push_back(model.norm.apply(row));
    }
    std::vector<double> weights(x.size(), 1.0);
    if (config.class_weighting == ClassWeighting::balanced) {
        const double n = static_cast<double>(x.size());
        const double w1 = n / (2.0 * static_cast<double>(ones));
        const double w0 = n / (2.0 * static_cast<double>(x.size() - ones));
        for (std::size_t k = 0; k < x.size(); ++k) {
            weights[k] = y[k] == 1 ? w1 : w0;
        }
    }

    const RngStream root(config.seed, 0);
    RngStream init = root.derive(0);
    model.network = Network(model.norm.kept.size(), config.hidden_layers, config.activation);
    model.network.initialise(init);

    std::vector<double> params = model.network.parameters();
    std::vector<double> velocity(params.size(), 0.0);
    std::vector<double> grad;
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);

    model.loss_history.push_back(model.network.loss_and_gradient(xs, y, weights, config.l2, nullptr));
    std::vector<std::vector<double>> bx;
    std::vector<int> by;
    std::vector<double> bw;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream shuffle = root.derive(1 + epoch);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle.below(i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            bx.clear();
            by.clear();
            bw.clear();
            for (std::size_t k = start; k < stop; ++k) {
                bx.push_back(xs[order[k]]);
                by.push_back(y[order[k]]);
                bw.push_back(weights[order[k]]);
            }
            (void)model.network.loss_and_gradient(bx, by, bw, config.l2, &grad);
            for (std::size_t p = 0; p < params.size(); ++p) {
                velocity[p] = config.momentum * velocity[p] - config.learning_rate * grad[p];
                params[p] += velocity[p];
            }
            model.network.set_parameters(params);
        }
        model.loss_history.push_back(model.network.loss_and_gradient(xs, y, weights, config.l2, nullptr));
    }
    return model;
}

TrainedModel train(const WindowedDataset& dataset, const NetConfig& config) {
    return train(dataset.rows, dataset.labels, config);
}

Prediction predict(const TrainedModel& model, std::span<const double> features) {
    if (features.size() != model.input_width) {
        throw std::domain_error(
            fmt::format("model expects {} features, got {}", model.input_width, features.size()));
    }
    if (model.degenerate) {
        return {model.constant_class, model.constant_class == 1 ? 1.0 : 0.0};
    }
    const double p = model.network.probability(model.norm.apply(features));
    return {p >= model.config.threshold ? 1 : 0, p};
}

std::vector<Prediction> predict(const TrainedModel& model, const std::vector<std::vector<double>>& rows) {
    std::vector<Prediction> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(predict(model, r));
    }
    return out;
}

std::vector<int> predicted_labels(std::span<const Prediction> predictions) {
    std::vector<int> out;
    out.reserve(predictions.size());
    for (const auto& p : predictions) {
        out.push_back(p.label);
    }
    return out;
}

ClassificationReport report_from_confusion(const std::array<std::array<std::size_t, 2>, 2>& confusion) {
    ClassificationReport r;
    r.confusion = confusion;
    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    std::size_t correct = 0;
    for (int c = 0; c < 2; ++c) {
        const std::size_t tp = confusion[c][c];
        const std::size_t predicted = confusion[0][c] + confusion[1][c];
        const std::size_t actual = confusion[c][0] + confusion[c][1];
        auto& m = r.classes[c];
        m.precision = ratio(tp, predicted);
        m.recall = ratio(tp, actual);
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.support = actual;
        correct += tp;
    }
    r.accuracy = ratio(correct, r.total());
    return r;
}

ClassificationReport classification_report(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw std::domain_error("predictions and labels differ in length");
    }
    if (labels.empty()) {
        throw std::domain_error("classification report needs at least one row");
    }
    check_binary(predictions, "predictions");
    check_binary(labels, "labels");
    std::array<std::array<std::size_t, 2>, 2> confusion{};
    for (std::size_t k = 0; k < labels.size(); ++k) {
        ++confusion[labels[k]][predictions[k]];
    }
    return report_from_confusion(confusion);
}

std::string format_report(const ClassificationReport& report, const std::string& title) {
    std::string out = fmt::format("{:<10}{:>10}{:>10}{:>10}{:>10}\n", title, "precision", "recall", "f1-score",
                                  "support");
    for (int c = 0; c < 2; ++c) {
        const auto& m = report.classes[c];
        out += fmt::format("{:<10}{:>10.2f}{:>10.2f}{:>10.2f}{:>10}\n", fmt::format("theta={}", c), m.precision,
                           m.recall, m.f1, m.support);
    }
    out += fmt::format("{:<10}{:>30.2f}{:>10}\n", "accuracy", report.accuracy, report.total());
    return out;
}

ThetaEstimate estimate_theta(const ClassificationReport& report, ThetaRule rule) {
    ThetaEstimate e;
    e.rule = rule;
    e.f1_class0 = report.classes[0].f1;
    e.f1_class1 = report.classes[1].f1;
    e.predicted_class0 = report.confusion[0][0] + report.confusion[1][0];
    e.predicted_class1 = report.confusion[0][1] + report.confusion[1][1];
    if (rule == ThetaRule::f1_comparison) {
        e.theta = e.f1_class1 > e.f1_class0 ? 1 : 0;
    } else {
        e.theta = e.predicted_class1 > e.predicted_class0 ? 1 : 0;
    }
    return e;
}

}  // namespace fbns
