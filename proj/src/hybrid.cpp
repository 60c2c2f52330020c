#include "neurosvm/hybrid.hpp"

#include "neurosvm/error.hpp"
#include "neurosvm/random.hpp"

#include <algorithm>
#include <cmath>

namespace neurosvm {

namespace {

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double activate(Activation a, double z) { return a == Activation::logistic ? logistic(z) : (z > 0.0 ? 1.0 : 0.0); }

}  // namespace

int threshold_unit(std::span<const double> w, std::span<const double> x, double u) {
    if (w.size() != x.size()) {
        throw ValidationError("threshold unit: " + std::to_string(w.size()) + " weights for " +
                              std::to_string(x.size()) + " inputs");
    }
    double z = -u;
    for (std::size_t j = 0; j < w.size(); ++j) {
        z += w[j] * x[j];
    }
    return z > 0.0 ? 1 : 0;
}

NetworkWeights make_network(std::vector<std::size_t> architecture, Activation activation) {
    if (architecture.size() < 2 || std::find(architecture.begin(), architecture.end(), 0) != architecture.end()) {
        throw ValidationError("network architecture needs at least two non-empty layers");
    }
    NetworkWeights net;
    net.architecture = std::move(architecture);
    net.activation = activation;
    for (std::size_t l = 1; l < net.architecture.size(); ++l) {
        net.layers.push_back({Matrix(net.architecture[l], net.architecture[l - 1]),
                              std::vector<double>(net.architecture[l], 0.0)});
    }
    return net;
}

NetworkWeights init_network(std::vector<std::size_t> architecture, std::uint64_t seed) {
    auto net = make_network(std::move(architecture));
    Rng rng(seed);
    std::vector<double> p(net.parameter_count());
    for (auto &v : p) {
        v = rng.uniform(-0.5, 0.5);
    }
    net.set_parameters(p);
    return net;
}

std::size_t NetworkWeights::parameter_count() const {
    std::size_t n = 0;
    for (const auto &layer : layers) {
        n += layer.weights.rows() * layer.weights.cols() + layer.thresholds.size();
    }
    return n;
}

std::vector<double> NetworkWeights::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto &layer : layers) {
        for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
            const auto row = layer.weights.row(r);
            p.insert(p.end(), row.begin(), row.end());
        }
        p.insert(p.end(), layer.thresholds.begin(), layer.thresholds.end());
    }
    return p;
}

void NetworkWeights::set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) {
        throw ValidationError("expected " + std::to_string(parameter_count()) + " network parameters, got " +
                              std::to_string(p.size()));
    }
    std::size_t at = 0;
    for (auto &layer : layers) {
        for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
            for (auto &w : layer.weights.row(r)) {
                w = p[at++];
            }
        }
        for (auto &u : layer.thresholds) {
            u = p[at++];
        }
    }
}

ForwardResult forward(const NetworkWeights &net, std::span<const double> x) {
    if (x.size() != net.inputs()) {
        throw ValidationError("network expects " + std::to_string(net.inputs()) + " inputs, got " +
                              std::to_string(x.size()));
    }
    ForwardResult res;
    res.activations.reserve(net.layers.size() + 1);
    res.activations.emplace_back(x.begin(), x.end());
    for (const auto &layer : net.layers) {
        const auto &prev = res.activations.back();
        if (layer.weights.cols() != prev.size() || layer.thresholds.size() != layer.weights.rows()) {
            throw ValidationError("network layer shapes are inconsistent");
        }
        std::vector<double> a(layer.weights.rows());
        for (std::size_t r = 0; r < a.size(); ++r) {
            double z = -layer.thresholds[r];
            const auto w = layer.weights.row(r);
            for (std::size_t c = 0; c < prev.size(); ++c) {
                z += w[c] * prev[c];
            }
            a[r] = activate(net.activation, z);
        }
        res.activations.push_back(std::move(a));
    }
    res.output = res.activations.back().front();
    return res;
}

double sse(const NetworkWeights &net, std::span<const Sample> samples) {
    double e = 0.0;
    for (const auto &s : samples) {
        const double diff = forward(net, s.x).output - s.target;
        e += 0.5 * diff * diff;
    }
    return e;
}

std::vector<double> sse_gradient(const NetworkWeights &net, std::span<const Sample> samples) {
    if (net.activation != Activation::logistic) {
        throw ValidationError("gradients need logistic activations");
    }
    const std::size_t L = net.layers.size();
    std::vector<Matrix> dW;
    std::vector<std::vector<double>> du;
    for (const auto &layer : net.layers) {
        dW.emplace_back(layer.weights.rows(), layer.weights.cols());
        du.emplace_back(layer.thresholds.size(), 0.0);
    }

    for (const auto &s : samples) {
        const auto fr = forward(net, s.x);
        const auto &acts = fr.activations;
        // delta = dE/dz for the current layer; z = W a - u so dE/du = -delta
        std::vector<double> delta(acts[L].size());
        for (std::size_t r = 0; r < delta.size(); ++r) {
            const double y = acts[L][r];
            delta[r] = (y - s.target) * y * (1.0 - y);
        }
        for (std::size_t l = L; l-- > 0;) {
            const auto &prev = acts[l];
            const auto &layer = net.layers[l];
            for (std::size_t r = 0; r < delta.size(); ++r) {
                for (std::size_t c = 0; c < prev.size(); ++c) {
                    dW[l](r, c) += delta[r] * prev[c];
                }
                du[l][r] -= delta[r];
            }
            if (l == 0) {
                break;
            }
            std::vector<double> next(prev.size(), 0.0);
            for (std::size_t c = 0; c < prev.size(); ++c) {
                double sum = 0.0;
                for (std::size_t r = 0; r < delta.size(); ++r) {
                    sum += layer.weights(r, c) * delta[r];
                }
                next[c] = sum * prev[c] * (1.0 - prev[c]);
            }
            delta = std::move(next);
        }
    }

    std::vector<double> g;
    g.reserve(net.parameter_count());
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t r = 0; r < dW[l].rows(); ++r) {
            const auto row = dW[l].row(r);
            g.insert(g.end(), row.begin(), row.end());
        }
        g.insert(g.end(), du[l].begin(), du[l].end());
    }
    return g;
}

TrainedNetwork train_network(std::span<const Sample> samples, const NetConfig &config, std::uint64_t seed) {
    if (samples.empty()) {
        throw ValidationError("network training needs at least one sample");
    }
    const std::size_t n_in = samples.front().x.size();
    for (const auto &s : samples) {
        if (s.x.size() != n_in) {
            throw ValidationError("all network samples must have the same input width");
        }
        if (!(s.target >= 0.0 && s.target <= 1.0)) {
            throw ValidationError("network targets must lie in [0, 1]");
        }
    }
    if (!(config.rate > 0.0)) {
        throw ValidationError("learning rate must be positive");
    }
    std::vector<std::size_t> arch{n_in};
    arch.insert(arch.end(), config.hidden.begin(), config.hidden.end());
    arch.push_back(1);

    TrainedNetwork out;
    out.weights = init_network(arch, seed);
    auto params = out.weights.parameters();
    for (std::size_t epoch = 0;; ++epoch) {
        const double e = sse(out.weights, samples);
        out.error_trace.push_back(e);
        if (!std::isfinite(e)) {
            throw SolverError("network loss became non-finite; use a smaller learning rate", epoch);
        }
        const auto g = sse_gradient(out.weights, samples);
        double norm = 0.0;
        for (auto v : g) {
            norm = std::max(norm, std::abs(v));
        }
        if (norm < config.grad_norm_stop) {
            out.converged = true;
            out.epochs = epoch;
            break;
        }
        if (epoch == config.max_epochs) {
            out.epochs = epoch;
            break;
        }
        for (std::size_t k = 0; k < params.size(); ++k) {
            params[k] -= config.rate * g[k];
        }
        out.weights.set_parameters(params);
    }
    return out;
}

std::vector<double> build_hybrid_inputs(const SvmModel &svm, std::span<const double> raw,
                                        std::span<const HybridInput> recipe) {
    const double f = svm.decision_value(raw);
    std::vector<double> in;
    in.reserve(recipe.size());
    for (auto kind : recipe) {
        in.push_back(kind == HybridInput::decision_value ? f
                                                         : (label_from_decision(f) == Label::patient ? 1.0 : 0.0));
    }
    return in;
}

HybridTraining train_neurosvm(const Matrix &x, std::span<const Label> y, const SvmConfig &svm_config,
                              const NetConfig &net_config, std::uint64_t seed) {
    HybridTraining out;
    out.model.svm = train_svm(x, y, svm_config);

    std::vector<Sample> samples;
    samples.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        samples.push_back({build_hybrid_inputs(out.model.svm, x.row(r), out.model.recipe),
                           y[r] == Label::patient ? 1.0 : 0.0});
    }
    auto trained = train_network(samples, net_config, seed);
    out.model.network = std::move(trained.weights);
    out.error_trace = std::move(trained.error_trace);
    out.epochs = trained.epochs;
    out.converged = trained.converged;
    return out;
}

HybridPrediction predict_neurosvm(const HybridModel &h, std::span<const double> raw) {
    const auto inputs = build_hybrid_inputs(h.svm, raw, h.recipe);
    const double score = forward(h.network, inputs).output;
    return {score > h.threshold ? Label::patient : Label::non_patient, score};
}

}  // namespace neurosvm
