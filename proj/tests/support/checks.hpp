#pragma once

#include "neurosvm/hybrid.hpp"
#include "neurosvm/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace neurosvm::fixtures {

/// P(score of a random class-1 record > score of a random class-2 record), ties counting half.
inline double pair_counting_auc(std::span<const Label> y, std::span<const double> s) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[i] == Label::patient && y[j] == Label::non_patient) {
                ++pairs;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

/// Largest KKT violation of a solved dual over its training set.
inline double kkt_residual(const Matrix &K, std::span<const int> y, const SmoResult &r, double C) {
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = r.bias;
        for (std::size_t j = 0; j < y.size(); ++j) {
            f += r.alpha[j] * y[j] * K(j, i);
        }
        const double m = y[i] * f;
        if (r.alpha[i] <= 0.0) {
            worst = std::max(worst, 1.0 - m);
        } else if (r.alpha[i] >= C) {
            worst = std::max(worst, m - 1.0);
        } else {
            worst = std::max(worst, std::abs(m - 1.0));
        }
    }
    return worst;
}

/// Same check for a trained model whose training rows are `raw`. Support vectors are
/// stored in row order, so they are matched to rows sequentially; other rows have alpha = 0.
inline double kkt_residual(const SvmModel &m, const Matrix &raw, std::span<const Label> y) {
    double worst = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const auto z = m.scaling.apply(raw.row(i));
        double alpha = 0.0;
        if (next < m.support.size() && m.support[next].x == z && m.support[next].y == svm_sign(y[i])) {
            alpha = m.support[next++].alpha;
        }
        const double margin = svm_sign(y[i]) * m.decision_value(raw.row(i));
        if (alpha <= 0.0) {
            worst = std::max(worst, 1.0 - margin);
        } else if (alpha >= m.C) {
            worst = std::max(worst, margin - 1.0);
        } else {
            worst = std::max(worst, std::abs(margin - 1.0));
        }
    }
    return next == m.support.size() ? worst : INFINITY;
}

inline std::vector<double> central_differences(NetworkWeights net, std::span<const Sample> s, double h) {
    auto p = net.parameters();
    std::vector<double> g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double saved = p[k];
        p[k] = saved + h;
        net.set_parameters(p);
        const double up = sse(net, s);
        p[k] = saved - h;
        net.set_parameters(p);
        const double down = sse(net, s);
        p[k] = saved;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

/// ||a - b|| / max(||a||, ||b||).
inline double relative_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    const double den = std::max(std::sqrt(na), std::sqrt(nb));
    return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

}  // namespace neurosvm::fixtures
