#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/learners/scaling.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace neurosvm {

struct Kernel {
    enum class Type { linear, rbf };

    Type type = Type::rbf;
    double gamma = 1.0;  ///< rbf only: K(a, b) = exp(-gamma * |a - b|^2)

    [[nodiscard]] double operator()(std::span<const double> a, std::span<const double> b) const;

    friend bool operator==(const Kernel &, const Kernel &) = default;
};

/// Gram matrix K(rows_i, rows_j).
Matrix kernel_matrix(const Kernel &k, const Matrix &x);

struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
    std::size_t iterations = 0;
    /// Indices that were ever part of a working pair.
    std::vector<bool> touched;
    /// Dual objective after every accepted pair update, when requested.
    std::vector<double> objective_trace;
};

struct SmoOptions {
    double C = 1.0;
    double tol = 1e-3;
    /// The solver gives up after max_passes * n pair updates.
    std::size_t max_passes = 200;
    bool record_objective = false;
};

/// Soft-margin dual by sequential minimal optimization. Each step optimizes the maximal
/// violating pair analytically; the solver stops once that pair's violation drops below
/// tol, which bounds every KKT residual y_i f(x_i) - 1 by tol / 2.
SmoResult smo_solve(const Matrix &K, std::span<const int> y, const SmoOptions &options = {});

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const Matrix &K, std::span<const int> y, std::span<const double> alpha);

struct SvmConfig {
    Kernel::Type kernel = Kernel::Type::rbf;
    /// rbf only; 0 selects 1 / feature count.
    double gamma = 0.0;
    double C = 1.0;
    double tol = 1e-3;
    std::size_t max_passes = 200;
};

struct SupportVector {
    std::vector<double> x;  ///< standardized coordinates
    int y = 1;              ///< +1 for class 1, -1 for class 2
    double alpha = 0.0;

    friend bool operator==(const SupportVector &, const SupportVector &) = default;
};

struct SvmModel {
    Kernel kernel;
    double C = 1.0;
    std::vector<SupportVector> support;
    double bias = 0.0;
    ScalingParams scaling;

    /// f(x) = sum alpha_i y_i K(sv_i, z(x)) + b on a raw (unscaled) feature vector.
    [[nodiscard]] double decision_value(std::span<const double> raw) const;
    /// Class 1 when f(x) >= 0.
    [[nodiscard]] Label predict(std::span<const double> raw) const;

    friend bool operator==(const SvmModel &, const SvmModel &) = default;
};

constexpr int svm_sign(Label l) noexcept { return l == Label::patient ? 1 : -1; }
constexpr Label label_from_decision(double f) noexcept { return f >= 0.0 ? Label::patient : Label::non_patient; }

/// Standardizes, maps labels {1 -> +1, 2 -> -1}, solves the dual. Throws ValidationError
/// when only one class is present and SolverError when SMO does not converge.
SvmModel train_svm(const Matrix &x, std::span<const Label> y, const SvmConfig &config = {});

}  // namespace neurosvm
