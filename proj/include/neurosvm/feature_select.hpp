#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/learners/ensemble.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neurosvm {

/// Pearson product-moment coefficient; throws ValidationError on a zero-variance input.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> feature_names;
    std::vector<std::size_t> columns;
    Matrix r;
};

CorrelationMatrix pearson_matrix(const Dataset &d, std::span<const std::size_t> columns);

struct CorrelationRemoval {
    std::string feature;
    std::string partner;
    double r = 0.0;
};

struct CorrelationFilterResult {
    std::vector<std::size_t> kept;  ///< schema columns, ascending
    std::vector<CorrelationRemoval> removed;
};

inline constexpr double kDefaultCorrelationThreshold = 0.70;

/// Repeatedly takes the pair with the largest |r| above threshold and drops whichever
/// member has the larger mean |r| against the remaining features (ties: larger column).
/// Only numeric columns take part; nominal candidates pass through untouched.
CorrelationFilterResult correlation_filter(const Dataset &d, std::span<const std::size_t> candidates,
                                           double threshold = kDefaultCorrelationThreshold);

enum class Decision { confirmed, rejected, tentative };

std::string_view to_string(Decision d) noexcept;

struct FeatureScore {
    std::string name;
    std::size_t column = 0;
    /// Mean permutation importance over the trials the feature took part in.
    double raw_importance = 0.0;
    double normalized_importance = 0.0;
    Decision decision = Decision::tentative;
    std::size_t hit_count = 0;
    std::size_t trials = 0;
};

struct BorutaConfig {
    std::size_t max_trials = 100;
    double alpha = 0.01;
    EnsembleConfig forest = EnsembleConfig::random_forest();
};

struct FeatureReport {
    static constexpr int kFormatVersion = 1;

    std::vector<FeatureScore> features;
    std::vector<CorrelationRemoval> correlation_removed;
    std::size_t trials_run = 0;
    std::uint64_t seed = 0;
    BorutaConfig config;

    [[nodiscard]] std::vector<std::size_t> columns_with(Decision d) const;
    /// Confirmed columns, or the tentative ones when nothing was confirmed.
    [[nodiscard]] std::vector<std::size_t> selected_columns() const;
};

/// Probability that Binomial(trials, 1/2) >= hits (upper) or <= hits (lower).
double binomial_upper_tail(std::size_t hits, std::size_t trials);
double binomial_lower_tail(std::size_t hits, std::size_t trials);

/// All-relevant selection against shadow features.
///
/// Each trial appends one shadow column per undecided-or-confirmed feature (a seeded
/// permutation of its source), trains a random forest on the widened matrix and scores a
/// hit for every real feature whose OOB permutation importance beats the best shadow.
/// After each trial a two-sided binomial test at `alpha` confirms or rejects features;
/// rejected features (and their shadows) leave the pool. Trial t works from
/// trial_seed = derive_seed(seed, t): the forest uses stream 0 of trial_seed, the
/// importance permutations stream 1, and the shadow of the k-th pool member stream k + 2.
/// Shadow assignment therefore follows pool order, not the schema column ids.
FeatureReport boruta(const Dataset &d, std::span<const std::size_t> candidates, const BorutaConfig &config,
                     std::uint64_t seed);

/// Correlation filter (when enabled) followed by Boruta over the surviving columns.
FeatureReport select_features(const Dataset &d, bool correlation_filter_enabled, const BorutaConfig &config,
                              std::uint64_t seed, double threshold = kDefaultCorrelationThreshold);

nlohmann::json to_json(const FeatureReport &r);

}  // namespace neurosvm
