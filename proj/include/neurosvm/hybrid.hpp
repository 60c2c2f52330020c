#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/learners/svm.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace neurosvm {

/// theta(sum_j w_j x_j - u) with theta(z) = 1 for z > 0, else 0 (so theta(0) = 0).
int threshold_unit(std::span<const double> w, std::span<const double> x, double u);

enum class Activation { logistic, step };

/// Fully connected layer: z = W a - u, row r of W feeding unit r.
struct Layer {
    Matrix weights;                 ///< units x inputs
    std::vector<double> thresholds;  ///< u, one per unit

    friend bool operator==(const Layer &, const Layer &) = default;
};

struct NetworkWeights {
    std::vector<std::size_t> architecture{2, 5, 1};
    std::vector<Layer> layers;
    Activation activation = Activation::logistic;

    [[nodiscard]] std::size_t inputs() const { return architecture.front(); }
    [[nodiscard]] std::size_t parameter_count() const;
    /// Layer by layer: weights row-major, then thresholds.
    [[nodiscard]] std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);

    friend bool operator==(const NetworkWeights &, const NetworkWeights &) = default;
};

/// Zero-filled network of the given shape; throws on fewer than two layers or a zero width.
NetworkWeights make_network(std::vector<std::size_t> architecture, Activation activation = Activation::logistic);
/// Every weight and threshold uniform in [-0.5, 0.5), drawn in parameters() order from Rng(seed).
NetworkWeights init_network(std::vector<std::size_t> architecture, std::uint64_t seed);

struct ForwardResult {
    double output = 0.0;
    /// activations[0] is the input, activations.back() the output layer.
    std::vector<std::vector<double>> activations;
};

ForwardResult forward(const NetworkWeights &net, std::span<const double> x);

struct Sample {
    std::vector<double> x;
    double target = 0.0;
};

/// E = 1/2 sum (y - t)^2 over samples, and its gradient in parameters() order (backprop).
double sse(const NetworkWeights &net, std::span<const Sample> samples);
std::vector<double> sse_gradient(const NetworkWeights &net, std::span<const Sample> samples);

struct NetConfig {
    std::vector<std::size_t> hidden{5};
    double rate = 0.05;
    std::size_t max_epochs = 10000;
    double grad_norm_stop = 0.01;
};

struct TrainedNetwork {
    NetworkWeights weights;
    /// SSE at the start of each epoch, followed by the SSE of the returned weights.
    std::vector<double> error_trace;
    std::size_t epochs = 0;
    bool converged = false;
};

/// Full-batch gradient descent on SSE with logistic units. Stops once the gradient
/// infinity-norm falls below grad_norm_stop or after max_epochs. Throws SolverError
/// when the loss becomes non-finite.
TrainedNetwork train_network(std::span<const Sample> samples, const NetConfig &config, std::uint64_t seed);

enum class HybridInput { decision_value, label };

struct HybridModel {
    SvmModel svm;
    NetworkWeights network;
    std::vector<HybridInput> recipe{HybridInput::decision_value, HybridInput::label};
    double threshold = 0.5;

    friend bool operator==(const HybridModel &, const HybridModel &) = default;
};

/// Signals the SVM contributes for one raw feature vector: f(x), and 1 for class 1 / 0 for class 2.
std::vector<double> build_hybrid_inputs(const SvmModel &svm, std::span<const double> raw,
                                        std::span<const HybridInput> recipe);

struct HybridTraining {
    HybridModel model;
    std::vector<double> error_trace;
    std::size_t epochs = 0;
    bool converged = false;
};

/// Trains the SVM, feeds its outputs for every training record into the network and
/// fits the network to target 1 for class 1, 0 for class 2.
HybridTraining train_neurosvm(const Matrix &x, std::span<const Label> y, const SvmConfig &svm_config,
                              const NetConfig &net_config, std::uint64_t seed);

struct HybridPrediction {
    Label label;
    double score;
};

/// Network output as score; class 1 only when score > threshold.
HybridPrediction predict_neurosvm(const HybridModel &h, std::span<const double> raw);

}  // namespace neurosvm
