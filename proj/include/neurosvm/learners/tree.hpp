#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace neurosvm {

/// One node of a flattened CART tree. Leaves have feature == kLeaf.
struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;
    double threshold = 0.0;  ///< go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    Label label = Label::patient;
    std::array<std::uint32_t, 2> counts{};  ///< training records routed here, {class 1, class 2}

    [[nodiscard]] bool is_leaf() const noexcept { return feature == kLeaf; }

    friend bool operator==(const TreeNode &, const TreeNode &) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    [[nodiscard]] Label predict(std::span<const double> x) const;
    [[nodiscard]] const TreeNode &leaf_for(std::span<const double> x) const;
    [[nodiscard]] bool uses_feature(std::size_t feature) const noexcept;
    [[nodiscard]] std::size_t depth() const;

    friend bool operator==(const DecisionTree &, const DecisionTree &) = default;
};

struct TreeConfig {
    /// Features examined per node; 0 means all of them (plain CART).
    std::size_t mtry = 0;
    std::size_t min_node_size = 1;
};

/// Grows an unpruned Gini CART tree on `rows` (duplicates allowed, as in a bootstrap).
/// Thresholds are midpoints of consecutive distinct values; the best split maximizes the
/// impurity decrease, ties resolved by lowest feature index then lowest threshold.
/// `rng` is consumed only for per-node feature sampling when 0 < mtry < cols.
DecisionTree train_tree(const Matrix &x, std::span<const Label> y, std::span<const std::size_t> rows,
                        const TreeConfig &config, Rng &rng);

DecisionTree train_tree(const Matrix &x, std::span<const Label> y, const TreeConfig &config = {});

}  // namespace neurosvm
