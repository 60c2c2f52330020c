#include "neurosvm/learners/svm.hpp"

#include "neurosvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neurosvm {

namespace {

constexpr double kTau = 1e-12;

// Trainable working-set membership for the direction of increasing y_t alpha_t.
bool in_up(int y, double a, double C) { return (y == 1 && a < C) || (y == -1 && a > 0.0); }
bool in_low(int y, double a, double C) { return (y == 1 && a > 0.0) || (y == -1 && a < C); }

}  // namespace

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
    if (type == Type::linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
        }
        return dot;
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        dist += d * d;
    }
    return std::exp(-gamma * dist);
}

Matrix kernel_matrix(const Kernel &k, const Matrix &x) {
    Matrix K(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = i; j < x.rows(); ++j) {
            const double v = k(x.row(i), x.row(j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

double dual_objective(const Matrix &K, std::span<const int> y, std::span<const double> alpha) {
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        linear += alpha[i];
        if (alpha[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * K(i, j);
        }
    }
    return linear - 0.5 * quad;
}

SmoResult smo_solve(const Matrix &K, std::span<const int> y, const SmoOptions &options) {
    const std::size_t n = y.size();
    if (K.rows() != n || K.cols() != n) {
        throw ValidationError("kernel matrix must be n x n for n labels");
    }
    if (n < 2) {
        throw ValidationError("SMO needs at least two points");
    }
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
    if (!has_pos || !has_neg || std::any_of(y.begin(), y.end(), [](int v) { return v != 1 && v != -1; })) {
        throw ValidationError("SMO needs labels in {-1, +1} with both present");
    }
    if (!(options.C > 0.0) || !(options.tol > 0.0)) {
        throw ValidationError("SMO needs C > 0 and tol > 0");
    }
    const double C = options.C;

    SmoResult res;
    res.alpha.assign(n, 0.0);
    res.touched.assign(n, false);
    // F_k = sum_l alpha_l y_l K_lk - y_k, i.e. the prediction error without bias
    std::vector<double> F(n);
    for (std::size_t k = 0; k < n; ++k) {
        F[k] = -static_cast<double>(y[k]);
    }

    const std::size_t max_iterations = options.max_passes * n;
    double m_up = 0.0, m_low = 0.0;
    while (true) {
        // maximal violating pair: i maximizes -F over I_up, j minimizes -F over I_low
        std::size_t i = n, j = n;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -F[t];
            if (in_up(y[t], res.alpha[t], C) && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low(y[t], res.alpha[t], C) && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        if (i == n || j == n || m_up - m_low < options.tol) {
            break;
        }
        if (res.iterations >= max_iterations) {
            throw SolverError("SMO did not reach tolerance " + std::to_string(options.tol), res.iterations);
        }
        ++res.iterations;
        res.touched[i] = true;
        res.touched[j] = true;

        const double yi = y[i], yj = y[j];
        const double ai = res.alpha[i], aj = res.alpha[j];
        double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (eta <= 0.0) {
            eta = kTau;
        }
        double lo, hi;
        if (y[i] != y[j]) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(C, C + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - C);
            hi = std::min(C, ai + aj);
        }
        double aj_new = std::clamp(aj + yj * (F[i] - F[j]) / eta, lo, hi);
        double ai_new = ai + yi * yj * (aj - aj_new);
        // snap near-bound values so rounding cannot leave a point just inside the box
        const double eps = 1e-12 * C;
        auto snap = [&](double a) { return a < eps ? 0.0 : (a > C - eps ? C : a); };
        ai_new = snap(std::clamp(ai_new, 0.0, C));
        aj_new = snap(aj_new);
        const double di = ai_new - ai;
        const double dj = aj_new - aj;
        if (di == 0.0 && dj == 0.0) {
            throw SolverError("SMO working pair made no progress", res.iterations);
        }
        res.alpha[i] = ai_new;
        res.alpha[j] = aj_new;
        for (std::size_t k = 0; k < n; ++k) {
            F[k] += yi * di * K(i, k) + yj * dj * K(j, k);
        }
        if (options.record_objective) {
            res.objective_trace.push_back(dual_objective(K, y, res.alpha));
        }
    }

    // feasible bias interval is [m_up, m_low]; at termination it is nearly tight
    if (std::isfinite(m_up) && std::isfinite(m_low)) {
        res.bias = 0.5 * (m_up + m_low);
    } else {
        res.bias = std::isfinite(m_up) ? m_up : m_low;
    }
    return res;
}

double SvmModel::decision_value(std::span<const double> raw) const {
    const auto z = scaling.apply(raw);
    double f = bias;
    for (const auto &sv : support) {
        f += sv.alpha * sv.y * kernel(sv.x, z);
    }
    return f;
}

Label SvmModel::predict(std::span<const double> raw) const { return label_from_decision(decision_value(raw)); }

SvmModel train_svm(const Matrix &x, std::span<const Label> y, const SvmConfig &config) {
    if (x.rows() != y.size()) {
        throw ValidationError("SVM training needs one label per row");
    }
    const bool has_patient = std::find(y.begin(), y.end(), Label::patient) != y.end();
    const bool has_other = std::find(y.begin(), y.end(), Label::non_patient) != y.end();
    if (!has_patient || !has_other) {
        throw ValidationError("SVM training needs both classes present");
    }
    SvmModel m;
    m.kernel.type = config.kernel;
    m.kernel.gamma = config.gamma > 0.0 ? config.gamma : 1.0 / static_cast<double>(x.cols());
    if (config.kernel == Kernel::Type::linear) {
        m.kernel.gamma = 0.0;
    }
    m.C = config.C;
    m.scaling = standardize_fit(x);
    const Matrix z = m.scaling.apply(x);

    std::vector<int> signs(y.size());
    std::transform(y.begin(), y.end(), signs.begin(), svm_sign);
    const auto K = kernel_matrix(m.kernel, z);
    const auto res = smo_solve(K, signs, {config.C, config.tol, config.max_passes, false});

    m.bias = res.bias;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (res.alpha[i] > 0.0) {
            const auto row = z.row(i);
            m.support.push_back({std::vector<double>(row.begin(), row.end()), signs[i], res.alpha[i]});
        }
    }
    return m;
}

}  // namespace neurosvm
