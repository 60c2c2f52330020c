#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/feature_select.hpp"
#include "neurosvm/model.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurosvm {

/// sqrt(1/n sum (actual_i - predicted_i)^2).
double rmse(std::span<const double> actual, std::span<const double> predicted);
/// 1/n sum |actual_i - predicted_i| / actual_i, as a fraction (not multiplied by 100).
double mape(std::span<const double> actual, std::span<const double> predicted);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint &, const RocPoint &) = default;
};

/// Class 1 is positive; higher score means more class 1. Tied scores move together.
std::vector<RocPoint> roc_curve(std::span<const Label> labels, std::span<const double> scores);
/// Trapezoid area under the curve.
double auc(std::span<const RocPoint> points);

/// counts[actual][predicted], index 0 = class 1.
struct Confusion {
    std::array<std::array<std::size_t, 2>, 2> counts{};

    [[nodiscard]] std::size_t total() const noexcept;
    [[nodiscard]] std::size_t correct() const noexcept { return counts[0][0] + counts[1][1]; }

    friend bool operator==(const Confusion &, const Confusion &) = default;
};

struct EvaluationReport {
    static constexpr int kFormatVersion = 1;

    std::size_t n = 0;
    double accuracy = 0.0;
    Confusion confusion;
    double rmse = 0.0;  ///< over numeric labels {1, 2}
    double mape = 0.0;
    std::vector<RocPoint> roc;  ///< empty when only one class is present
    std::optional<double> auc;
};

EvaluationReport evaluate(std::span<const Label> actual, std::span<const Prediction> predicted);
EvaluationReport evaluate_model(const TrainedModel &m, const Dataset &d);

struct FoldResult {
    std::size_t fold = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    bool failed = false;
    std::string error;
    EvaluationReport report;
};

struct CrossValidationReport {
    std::vector<FoldResult> folds;
    std::size_t failed_folds = 0;
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;  ///< sample stddev over successful folds
};

/// Fold f trains on the other k - 1 folds with seed derive_seed(seed, f + 1) and is
/// evaluated on fold f. A fold whose training fails is reported as failed, not dropped.
CrossValidationReport cross_validate(const TrainSpec &spec, const Dataset &d, std::span<const std::size_t> columns,
                                     std::size_t k, std::uint64_t seed);

struct ReferenceAccuracy {
    Algorithm algorithm;
    double accuracy;
};

/// Accuracies (fractions) of the published comparison table; reference lines only.
inline constexpr ReferenceAccuracy kReferenceAccuracies[] = {{Algorithm::naive_bayes, 0.5309},
                                                         {Algorithm::bagging, 0.6673},
                                                         {Algorithm::random_forest, 0.6767},
                                                         {Algorithm::svm, 0.7622},
                                                         {Algorithm::neurosvm, 0.9883}};
double reference_accuracy(Algorithm a);

struct CompareConfig {
    std::uint64_t seed = 7;
    double split_fraction = kDefaultSplitFraction;
    bool correlation_filter = true;
    double correlation_threshold = kDefaultCorrelationThreshold;
    BorutaConfig boruta;
    /// Explicit feature columns skip the selection stage entirely.
    std::optional<std::vector<std::size_t>> features;
    std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
    /// Per-algorithm hyperparameters; the algorithm field is overwritten per row.
    TrainSpec spec;
};

struct ComparisonRow {
    Algorithm algorithm;
    EvaluationReport test;
    EvaluationReport train;
    double reference_accuracy = 0.0;
};

struct ComparisonTable {
    static constexpr int kFormatVersion = 1;

    std::uint64_t seed = 0;
    std::size_t records_raw = 0;
    std::size_t records_clean = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<std::string> features;
    std::optional<FeatureReport> selection;
    std::vector<ComparisonRow> rows;

    [[nodiscard]] const ComparisonRow &row(Algorithm a) const;
};

/// Seeds used by compare_all, exposed so callers can reproduce a single stage.
std::uint64_t selection_seed(std::uint64_t seed);
std::uint64_t training_seed(std::uint64_t seed, Algorithm a);

/// Cleaned data, chosen feature columns and the train/test split shared by every algorithm.
struct PreparedData {
    Dataset clean;
    std::vector<std::size_t> columns;
    std::optional<FeatureReport> selection;
    SplitResult parts;
};

/// Selected columns, or every candidate the selector saw when none survived.
std::vector<std::size_t> resolve_columns(const FeatureReport &r);

PreparedData prepare(const Dataset &raw, const CompareConfig &config);

/// Full pipeline: drop incomplete records, select features, split, train every
/// algorithm on the training part and evaluate on both parts.
ComparisonTable compare_all(const Dataset &raw, const CompareConfig &config = {});

nlohmann::json to_json(const EvaluationReport &r);
nlohmann::json to_json(const CrossValidationReport &r);
nlohmann::json to_json(const ComparisonTable &t);
EvaluationReport evaluation_from_json(const nlohmann::json &j);
std::string render_text(const ComparisonTable &t);
std::string render_text(const CrossValidationReport &r);
std::string render_text(const EvaluationReport &r);
std::string render_text(const FeatureReport &r);

}  // namespace neurosvm
