#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fbns/jumplab.hpp"
#include "fbns/rng.hpp"

namespace fbns {

enum class Activation { logistic, rectifier };
enum class ClassWeighting { none, balanced };

struct NetConfig {
    std::vector<std::size_t> hidden_layers{16};  ///< sizes between the input (width W) and the single logistic output
    Activation activation = Activation::rectifier;
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    double l2 = 1e-4;
    ClassWeighting class_weighting = ClassWeighting::balanced;
    double threshold = 0.5;  ///< class 1 iff probability >= threshold

    void validate() const;
    friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  ///< row-major outputs x inputs
    std::vector<double> biases;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Fully connected network with a scalar logistic output.
class Network {
  public:
    Network() = default;
    /// Zero parameters.
    Network(std::size_t input_width, const std::vector<std::size_t>& hidden, Activation activation);

    /// Uniform Glorot initialisation from `rng`.
    void initialise(RngStream& rng);

    [[nodiscard]] std::size_t input_width() const noexcept { return layers_.empty() ? 0 : layers_.front().inputs; }
    [[nodiscard]] Activation activation() const noexcept { return activation_; }
    [[nodiscard]] const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::vector<DenseLayer>& layers() noexcept { return layers_; }

    [[nodiscard]] std::size_t parameter_count() const noexcept;
    [[nodiscard]] std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    /// Pre-sigmoid output.
    [[nodiscard]] double logit(std::span<const double> x) const;
    [[nodiscard]] double probability(std::span<const double> x) const;

    /// Weighted mean binary cross-entropy plus (l2 / 2) * sum of squared weights
    /// (biases excluded). When `gradient` is non-null it receives d loss / d parameters
    /// in the parameters() order.
    [[nodiscard]] double loss_and_gradient(const std::vector<std::vector<double>>& x, std::span<const int> y,
                                           std::span<const double> sample_weights, double l2,
                                           std::vector<double>* gradient) const;

    friend bool operator==(const Network&, const Network&) = default;

  private:
    std::vector<DenseLayer> layers_;
    Activation activation_ = Activation::rectifier;
};

struct FeatureNorm {
    std::vector<std::size_t> kept;     ///< input columns used by the network
    std::vector<std::size_t> dropped;  ///< zero-variance columns on the training split
    std::vector<double> mean;          ///< per kept column
    std::vector<double> stdev;         ///< per kept column, > 0

    [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;
    friend bool operator==(const FeatureNorm&, const FeatureNorm&) = default;
};

struct TrainedModel {
    static constexpr int format_version = 1;

    NetConfig config;
    std::size_t input_width = 0;
    FeatureNorm norm;
    Network network;
    /// Single-class training set: the model always returns constant_class.
    bool degenerate = false;
    int constant_class = 0;
    /// Full training loss before the first epoch and after each epoch.
    std::vector<double> loss_history;

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// Deterministic given (data, config). Requires >= 2 rows of equal width.
[[nodiscard]] TrainedModel train(const std::vector<std::vector<double>>& x, std::span<const int> y,
                                 const NetConfig& config);
[[nodiscard]] TrainedModel train(const WindowedDataset& dataset, const NetConfig& config);

struct Prediction {
    int label = 0;
    double probability = 0.0;
};

[[nodiscard]] Prediction predict(const TrainedModel& model, std::span<const double> features);
[[nodiscard]] std::vector<Prediction> predict(const TrainedModel& model, const std::vector<std::vector<double>>& rows);
[[nodiscard]] std::vector<int> predicted_labels(std::span<const Prediction> predictions);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct ClassificationReport {
    std::array<ClassMetrics, 2> classes;
    double accuracy = 0.0;
    /// confusion[true][predicted]
    std::array<std::array<std::size_t, 2>, 2> confusion{};

    [[nodiscard]] std::size_t total() const noexcept { return classes[0].support + classes[1].support; }
    friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

/// Labels and predictions must be 0 or 1 and of equal non-zero length.
[[nodiscard]] ClassificationReport classification_report(std::span<const int> predictions, std::span<const int> labels);
[[nodiscard]] ClassificationReport report_from_confusion(const std::array<std::array<std::size_t, 2>, 2>& confusion);
/// Aligned text with one row per class: precision, recall, f1-score, support.
[[nodiscard]] std::string format_report(const ClassificationReport& report, const std::string& title = "");

enum class ThetaRule {
    f1_comparison,   ///< 1 iff f1 of class 1 exceeds f1 of class 0
    majority_class,  ///< the more often predicted class; ties go to 0
};

struct ThetaEstimate {
    int theta = 0;
    ThetaRule rule = ThetaRule::f1_comparison;
    double f1_class0 = 0.0;
    double f1_class1 = 0.0;
    std::size_t predicted_class0 = 0;
    std::size_t predicted_class1 = 0;
};

[[nodiscard]] ThetaEstimate estimate_theta(const ClassificationReport& report,
                                           ThetaRule rule = ThetaRule::f1_comparison);

}  // namespace fbns
