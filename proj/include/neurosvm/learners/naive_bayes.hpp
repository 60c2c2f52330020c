#pragma once

#include "neurosvm/dataset.hpp"

#include <array>
#include <span>
#include <vector>

namespace neurosvm {

/// Gaussian class-conditional likelihoods. Index 0 holds class 1, index 1 class 2.
struct NaiveBayesModel {
    struct ClassParams {
        double prior = 0.0;
        bool present = false;
        std::vector<double> mean;
        std::vector<double> variance;

        friend bool operator==(const ClassParams &, const ClassParams &) = default;
    };

    std::array<ClassParams, 2> classes;
    double variance_floor = 0.0;

    /// Posterior probability of class 1; the two posteriors sum to one.
    [[nodiscard]] double posterior_patient(std::span<const double> x) const { return posteriors(x)[0]; }
    /// Posteriors of {class 1, class 2}, each computed by log-sum-exp.
    [[nodiscard]] std::array<double, 2> posteriors(std::span<const double> x) const;

    friend bool operator==(const NaiveBayesModel &, const NaiveBayesModel &) = default;
};

/// Population (MLE) variances, floored at 1e-9 * the largest feature variance.
NaiveBayesModel train_naive_bayes(const Matrix &x, std::span<const Label> y);

}  // namespace neurosvm
