#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/learners/tree.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace neurosvm {

enum class EnsembleKind { bagging, random_forest };

struct EnsembleConfig {
    EnsembleKind kind = EnsembleKind::random_forest;
    std::size_t trees = 500;
    /// Random forest only; 0 selects floor(sqrt(feature count)).
    std::size_t mtry = 0;

    static EnsembleConfig bagging(std::size_t trees = 25) { return {EnsembleKind::bagging, trees, 0}; }
    static EnsembleConfig random_forest(std::size_t trees = 500, std::size_t mtry = 0) {
        return {EnsembleKind::random_forest, trees, mtry};
    }
};

struct EnsembleModel {
    EnsembleKind kind = EnsembleKind::random_forest;
    std::vector<DecisionTree> trees;
    /// Tree t's bootstrap and feature sampling are driven by Rng(tree_seeds[t]).
    std::vector<std::uint64_t> tree_seeds;
    std::size_t mtry = 0;
    std::size_t feature_count = 0;
    std::size_t train_size = 0;
    std::optional<double> oob_error;  ///< random forest only

    /// Fraction of trees voting class 1.
    [[nodiscard]] double vote_fraction(std::span<const double> x) const;
    /// Majority vote, ties toward class 1.
    [[nodiscard]] Label predict(std::span<const double> x) const;

    friend bool operator==(const EnsembleModel &, const EnsembleModel &) = default;
};

/// n draws with replacement from [0, n) taken from the head of Rng(tree_seed).
std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t tree_seed);
/// Ascending positions absent from the bootstrap sample of `tree_seed`.
std::vector<std::size_t> out_of_bag_rows(std::size_t n, std::uint64_t tree_seed);

EnsembleModel train_ensemble(const Matrix &x, std::span<const Label> y, const EnsembleConfig &config,
                             std::uint64_t seed);

/// Mean over trees of (OOB accuracy - OOB accuracy with feature f permuted among the
/// tree's OOB records). Trees without OOB records are skipped. `x`, `y` must be the
/// training data of `m`.
std::vector<double> oob_permutation_importance(const EnsembleModel &m, const Matrix &x, std::span<const Label> y,
                                               std::uint64_t seed);

}  // namespace neurosvm
