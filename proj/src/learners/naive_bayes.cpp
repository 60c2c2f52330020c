#include "neurosvm/learners/naive_bayes.hpp"

#include "neurosvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace neurosvm {

namespace {

constexpr double kFloorFactor = 1e-9;

std::size_t slot(Label l) { return l == Label::patient ? 0 : 1; }

}  // namespace

NaiveBayesModel train_naive_bayes(const Matrix &x, std::span<const Label> y) {
    if (x.rows() != y.size() || x.rows() == 0) {
        throw ValidationError("naive Bayes needs a non-empty design matrix with one label per row");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    double max_variance = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            mean += x(r, c);
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            ss += (x(r, c) - mean) * (x(r, c) - mean);
        }
        max_variance = std::max(max_variance, ss / static_cast<double>(n));
    }

    NaiveBayesModel m;
    m.variance_floor = kFloorFactor * max_variance;
    if (!(m.variance_floor > 0.0)) {
        // every feature constant: any positive floor keeps densities finite
        m.variance_floor = kFloorFactor;
    }

    std::array<std::size_t, 2> counts{};
    for (auto l : y) {
        ++counts[slot(l)];
    }
    for (std::size_t k = 0; k < 2; ++k) {
        auto &cp = m.classes[k];
        cp.prior = static_cast<double>(counts[k]) / static_cast<double>(n);
        cp.present = counts[k] > 0;
        cp.mean.assign(d, 0.0);
        cp.variance.assign(d, m.variance_floor);
        if (!cp.present) {
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (slot(y[r]) == k) {
                    sum += x(r, c);
                }
            }
            const double mean = sum / static_cast<double>(counts[k]);
            double ss = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (slot(y[r]) == k) {
                    ss += (x(r, c) - mean) * (x(r, c) - mean);
                }
            }
            cp.mean[c] = mean;
            cp.variance[c] = std::max(ss / static_cast<double>(counts[k]), m.variance_floor);
        }
    }
    return m;
}

std::array<double, 2> NaiveBayesModel::posteriors(std::span<const double> x) const {
    if (!classes[1].present) {
        return {1.0, 0.0};
    }
    if (!classes[0].present) {
        return {0.0, 1.0};
    }
    std::array<double, 2> log_joint{};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto &cp = classes[k];
        if (x.size() != cp.mean.size()) {
            throw ValidationError("naive Bayes expects " + std::to_string(cp.mean.size()) + " features");
        }
        double lj = std::log(cp.prior);
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double diff = x[c] - cp.mean[c];
            lj += -0.5 * std::log(2.0 * std::numbers::pi * cp.variance[c]) - diff * diff / (2.0 * cp.variance[c]);
        }
        log_joint[k] = lj;
    }
    const double top = std::max(log_joint[0], log_joint[1]);
    const double log_norm = top + std::log(std::exp(log_joint[0] - top) + std::exp(log_joint[1] - top));
    return {std::exp(log_joint[0] - log_norm), std::exp(log_joint[1] - log_norm)};
}

}  // namespace neurosvm
