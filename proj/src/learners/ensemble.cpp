#include "neurosvm/learners/ensemble.hpp"

#include "neurosvm/error.hpp"
#include "neurosvm/random.hpp"

#include <algorithm>
#include <cmath>

namespace neurosvm {

namespace {

std::size_t resolve_mtry(const EnsembleConfig &config, std::size_t d) {
    if (config.kind == EnsembleKind::bagging) {
        return d;
    }
    if (config.mtry == 0) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
    }
    if (config.mtry > d) {
        throw ValidationError("mtry " + std::to_string(config.mtry) + " exceeds feature count " + std::to_string(d));
    }
    return config.mtry;
}

std::vector<std::size_t> draw_bootstrap(std::size_t n, Rng &rng) {
    std::vector<std::size_t> rows(n);
    for (auto &r : rows) {
        r = static_cast<std::size_t>(rng.below(n));
    }
    return rows;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t> &in_bag) {
    std::vector<char> seen(n, 0);
    for (auto r : in_bag) {
        seen[r] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

std::vector<std::size_t> bootstrap_rows(std::size_t n, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    return draw_bootstrap(n, rng);
}

std::vector<std::size_t> out_of_bag_rows(std::size_t n, std::uint64_t tree_seed) {
    return complement(n, bootstrap_rows(n, tree_seed));
}

EnsembleModel train_ensemble(const Matrix &x, std::span<const Label> y, const EnsembleConfig &config,
                             std::uint64_t seed) {
    if (x.rows() == 0 || x.rows() != y.size()) {
        throw ValidationError("ensemble training needs a non-empty design matrix with one label per row");
    }
    if (config.trees == 0) {
        throw ValidationError("ensemble needs at least one tree");
    }
    const std::size_t n = x.rows();
    EnsembleModel m;
    m.kind = config.kind;
    m.feature_count = x.cols();
    m.train_size = n;
    m.mtry = resolve_mtry(config, x.cols());

    TreeConfig tree_config;
    tree_config.mtry = config.kind == EnsembleKind::random_forest ? m.mtry : 0;

    m.trees.reserve(config.trees);
    m.tree_seeds.reserve(config.trees);
    for (std::size_t t = 0; t < config.trees; ++t) {
        const auto tree_seed = derive_seed(seed, t);
        Rng rng(tree_seed);
        const auto rows = draw_bootstrap(n, rng);
        m.trees.push_back(train_tree(x, y, rows, tree_config, rng));
        m.tree_seeds.push_back(tree_seed);
    }

    if (config.kind == EnsembleKind::random_forest) {
        std::vector<std::size_t> votes_patient(n, 0), votes_total(n, 0);
        for (std::size_t t = 0; t < m.trees.size(); ++t) {
            for (const auto r : out_of_bag_rows(n, m.tree_seeds[t])) {
                ++votes_total[r];
                if (m.trees[t].predict(x.row(r)) == Label::patient) {
                    ++votes_patient[r];
                }
            }
        }
        std::size_t counted = 0, wrong = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (votes_total[r] == 0) {
                continue;
            }
            ++counted;
            const Label vote = 2 * votes_patient[r] >= votes_total[r] ? Label::patient : Label::non_patient;
            if (vote != y[r]) {
                ++wrong;
            }
        }
        if (counted > 0) {
            m.oob_error = static_cast<double>(wrong) / static_cast<double>(counted);
        }
    }
    return m;
}

double EnsembleModel::vote_fraction(std::span<const double> x) const {
    if (x.size() != feature_count) {
        throw ValidationError("ensemble expects " + std::to_string(feature_count) + " features, got " +
                              std::to_string(x.size()));
    }
    std::size_t patient = 0;
    for (const auto &t : trees) {
        if (t.predict(x) == Label::patient) {
            ++patient;
        }
    }
    return static_cast<double>(patient) / static_cast<double>(trees.size());
}

Label EnsembleModel::predict(std::span<const double> x) const {
    return vote_fraction(x) >= 0.5 ? Label::patient : Label::non_patient;
}

std::vector<double> oob_permutation_importance(const EnsembleModel &m, const Matrix &x, std::span<const Label> y,
                                               std::uint64_t seed) {
    if (x.rows() != m.train_size || x.cols() != m.feature_count || y.size() != x.rows()) {
        throw ValidationError("permutation importance needs the ensemble's own training data");
    }
    const std::size_t d = x.cols();
    std::vector<double> importance(d, 0.0);
    std::size_t contributing = 0;
    std::vector<double> probe(d);

    for (std::size_t t = 0; t < m.trees.size(); ++t) {
        const auto &tree = m.trees[t];
        const auto oob = out_of_bag_rows(x.rows(), m.tree_seeds[t]);
        if (oob.empty()) {
            continue;
        }
        ++contributing;
        const double count = static_cast<double>(oob.size());
        std::size_t correct = 0;
        for (const auto r : oob) {
            if (tree.predict(x.row(r)) == y[r]) {
                ++correct;
            }
        }
        const double base = static_cast<double>(correct) / count;

        const auto tree_stream = derive_seed(seed, t);
        for (std::size_t f = 0; f < d; ++f) {
            if (!tree.uses_feature(f)) {
                continue;  // permuting an unused feature cannot change any prediction
            }
            std::vector<std::size_t> perm = oob;
            Rng rng(derive_seed(tree_stream, f));
            fisher_yates(std::span<std::size_t>(perm), rng);
            std::size_t permuted_correct = 0;
            for (std::size_t i = 0; i < oob.size(); ++i) {
                const auto row = x.row(oob[i]);
                std::copy(row.begin(), row.end(), probe.begin());
                probe[f] = x(perm[i], f);
                if (tree.predict(probe) == y[oob[i]]) {
                    ++permuted_correct;
                }
            }
            importance[f] += base - static_cast<double>(permuted_correct) / count;
        }
    }
    if (contributing > 0) {
        for (auto &v : importance) {
            v /= static_cast<double>(contributing);
        }
    }
    return importance;
}

}  // namespace neurosvm
