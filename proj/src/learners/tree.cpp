#include "neurosvm/learners/tree.hpp"

#include "neurosvm/error.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace neurosvm {

namespace {

std::size_t slot(Label l) { return l == Label::patient ? 0 : 1; }

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;  ///< sum over children of (sum of squared class counts / child size); larger is purer
};

class Builder {
  public:
    Builder(const Matrix &x, std::span<const Label> y, const TreeConfig &config, Rng &rng)
        : x_(x), y_(y), config_(config), rng_(rng) {
        features_.resize(x.cols());
        std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        rows_ = std::move(rows);
        grow(0, rows_.size());
        return std::move(tree_);
    }

  private:
    std::int32_t grow(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        TreeNode node;
        for (std::size_t i = begin; i < end; ++i) {
            ++node.counts[slot(y_[rows_[i]])];
        }
        node.label = node.counts[0] >= node.counts[1] ? Label::patient : Label::non_patient;

        const std::size_t size = end - begin;
        const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
        if (pure || size <= config_.min_node_size) {
            tree_.nodes[static_cast<std::size_t>(id)] = node;
            return id;
        }

        const Split best = find_split(begin, end, node.counts);
        if (!best.found) {
            tree_.nodes[static_cast<std::size_t>(id)] = node;
            return id;
        }

        const auto mid_it = std::stable_partition(
            rows_.begin() + static_cast<std::ptrdiff_t>(begin), rows_.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t r) { return x_(r, best.feature) <= best.threshold; });
        const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

        node.feature = static_cast<std::int32_t>(best.feature);
        node.threshold = best.threshold;
        node.left = grow(begin, mid);
        node.right = grow(mid, end);
        tree_.nodes[static_cast<std::size_t>(id)] = node;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t d = x_.cols();
        if (config_.mtry == 0 || config_.mtry >= d) {
            return features_;
        }
        // partial Fisher-Yates: the first mtry slots become a uniform sample without replacement
        std::vector<std::size_t> pool = features_;
        for (std::size_t i = 0; i < config_.mtry; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.below(d - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(config_.mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    Split find_split(std::size_t begin, std::size_t end, const std::array<std::uint32_t, 2> &totals) {
        Split best;
        const std::size_t size = end - begin;
        const double parent_score =
            (static_cast<double>(totals[0]) * totals[0] + static_cast<double>(totals[1]) * totals[1]) /
            static_cast<double>(size);

        std::vector<std::pair<double, std::size_t>> values(size);
        for (const auto f : candidate_features()) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto r = rows_[i];
                values[i - begin] = {x_(r, f), slot(y_[r])};
            }
            std::sort(values.begin(), values.end());
            if (values.front().first == values.back().first) {
                continue;
            }
            std::array<double, 2> left{};
            for (std::size_t i = 0; i + 1 < size; ++i) {
                left[values[i].second] += 1.0;
                if (values[i].first == values[i + 1].first) {
                    continue;
                }
                const double n_left = static_cast<double>(i + 1);
                const double n_right = static_cast<double>(size) - n_left;
                const double r0 = totals[0] - left[0];
                const double r1 = totals[1] - left[1];
                const double score =
                    (left[0] * left[0] + left[1] * left[1]) / n_left + (r0 * r0 + r1 * r1) / n_right;
                if (!best.found || score > best.score) {
                    const double lo = values[i].first;
                    const double hi = values[i + 1].first;
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) {
                        threshold = lo;  // adjacent doubles: keep the left value on the left
                    }
                    best = {true, f, threshold, score};
                }
            }
        }
        // a split never lowers the weighted Gini; reject only numerically worse ones
        if (best.found && best.score < parent_score * (1.0 - 1e-12)) {
            best.found = false;
        }
        return best;
    }

    const Matrix &x_;
    std::span<const Label> y_;
    const TreeConfig &config_;
    Rng &rng_;
    std::vector<std::size_t> features_;
    std::vector<std::size_t> rows_;
    DecisionTree tree_;
};

}  // namespace

DecisionTree train_tree(const Matrix &x, std::span<const Label> y, std::span<const std::size_t> rows,
                        const TreeConfig &config, Rng &rng) {
    if (x.rows() != y.size()) {
        throw ValidationError("tree training needs one label per row");
    }
    if (rows.empty()) {
        throw ValidationError("tree training needs at least one record");
    }
    Builder builder(x, y, config, rng);
    return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

DecisionTree train_tree(const Matrix &x, std::span<const Label> y, const TreeConfig &config) {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(0);
    return train_tree(x, y, rows, config, rng);
}

const TreeNode &DecisionTree::leaf_for(std::span<const double> x) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const auto &n = nodes[at];
        at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[at];
}

Label DecisionTree::predict(std::span<const double> x) const { return leaf_for(x).label; }

bool DecisionTree::uses_feature(std::size_t feature) const noexcept {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const TreeNode &n) { return !n.is_leaf() && static_cast<std::size_t>(n.feature) == feature; });
}

std::size_t DecisionTree::depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        const auto [at, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        const auto &n = nodes[at];
        if (!n.is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
        }
    }
    return best;
}

}  // namespace neurosvm
