#pragma once

#include "neurosvm/dataset.hpp"
#include "neurosvm/hybrid.hpp"
#include "neurosvm/learners/ensemble.hpp"
#include "neurosvm/learners/naive_bayes.hpp"
#include "neurosvm/learners/svm.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace neurosvm {

enum class Algorithm { naive_bayes, bagging, random_forest, svm, neurosvm };

/// CLI / storage tag: nb, bagging, rf, svm, neurosvm.
std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view tag);
/// Display name used in comparison tables.
std::string_view display_name(Algorithm a) noexcept;
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::naive_bayes, Algorithm::bagging, Algorithm::random_forest,
                                               Algorithm::svm, Algorithm::neurosvm};

struct TrainSpec {
    Algorithm algorithm = Algorithm::svm;
    EnsembleConfig bagging = EnsembleConfig::bagging();
    EnsembleConfig forest = EnsembleConfig::random_forest();
    SvmConfig svm;
    NetConfig net;

    static TrainSpec defaults(Algorithm a) {
        TrainSpec s;
        s.algorithm = a;
        return s;
    }
};

using ModelBody = std::variant<NaiveBayesModel, EnsembleModel, SvmModel, HybridModel>;

struct TrainedModel {
    Algorithm algorithm = Algorithm::svm;
    TrainSpec spec;
    /// Schema columns the model reads, in model input order.
    std::vector<std::size_t> columns;
    std::vector<std::string> features;
    ModelBody body;
};

struct Prediction {
    Label label;
    /// NB: posterior of class 1. Ensembles: fraction of trees voting 1.
    /// SVM: decision value. NeuroSVM: network output.
    double score;

    friend bool operator==(const Prediction &, const Prediction &) = default;
};

/// Dispatches on spec.algorithm. Requires a complete, labeled dataset; deterministic in (spec, d, columns, seed).
TrainedModel train(const TrainSpec &spec, const Dataset &d, std::span<const std::size_t> columns,
                   std::uint64_t seed);

Prediction predict(const TrainedModel &m, const Record &r);
/// `features` holds the model's inputs in model order.
Prediction predict_features(const TrainedModel &m, std::span<const double> features);

}  // namespace neurosvm
