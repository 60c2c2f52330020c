#include "neurosvm/model.hpp"

#include "neurosvm/error.hpp"

#include <algorithm>

namespace neurosvm {

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::naive_bayes:
        return "nb";
    case Algorithm::bagging:
        return "bagging";
    case Algorithm::random_forest:
        return "rf";
    case Algorithm::svm:
        return "svm";
    case Algorithm::neurosvm:
        return "neurosvm";
    }
    return "unknown";
}

std::string_view display_name(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::naive_bayes:
        return "Naive Bayes";
    case Algorithm::bagging:
        return "Bagging";
    case Algorithm::random_forest:
        return "Random Forest";
    case Algorithm::svm:
        return "Support Vector Machine";
    case Algorithm::neurosvm:
        return "NeuroSVM";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
    for (auto a : kAllAlgorithms) {
        if (to_string(a) == tag) {
            return a;
        }
    }
    throw ValidationError("unknown algorithm '" + std::string(tag) + "' (expected nb|bagging|rf|svm|neurosvm)");
}

TrainedModel train(const TrainSpec &spec, const Dataset &d, std::span<const std::size_t> columns,
                   std::uint64_t seed) {
    if (columns.empty()) {
        throw ValidationError("training needs at least one feature");
    }
    if (d.size() == 0) {
        throw ValidationError("training needs at least one record");
    }
    const Matrix x = to_matrix(d, columns);
    const auto y = labels_of(d);

    TrainedModel m;
    m.algorithm = spec.algorithm;
    m.spec = spec;
    m.columns.assign(columns.begin(), columns.end());
    m.features = names_of(d.schema, columns);

    switch (spec.algorithm) {
    case Algorithm::naive_bayes:
        m.body = train_naive_bayes(x, y);
        break;
    case Algorithm::bagging: {
        auto cfg = spec.bagging;
        cfg.kind = EnsembleKind::bagging;
        m.body = train_ensemble(x, y, cfg, seed);
        break;
    }
    case Algorithm::random_forest: {
        auto cfg = spec.forest;
        cfg.kind = EnsembleKind::random_forest;
        m.body = train_ensemble(x, y, cfg, seed);
        break;
    }
    case Algorithm::svm:
        m.body = train_svm(x, y, spec.svm);
        break;
    case Algorithm::neurosvm:
        m.body = train_neurosvm(x, y, spec.svm, spec.net, seed).model;
        break;
    }
    return m;
}

Prediction predict_features(const TrainedModel &m, std::span<const double> x) {
    if (x.size() != m.columns.size()) {
        throw ValidationError("model expects " + std::to_string(m.columns.size()) + " features, got " +
                              std::to_string(x.size()));
    }
    return std::visit(
        [&](const auto &body) -> Prediction {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                const double p = body.posterior_patient(x);
                return {p >= 0.5 ? Label::patient : Label::non_patient, p};
            } else if constexpr (std::is_same_v<T, EnsembleModel>) {
                const double v = body.vote_fraction(x);
                return {v >= 0.5 ? Label::patient : Label::non_patient, v};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                const double f = body.decision_value(x);
                return {label_from_decision(f), f};
            } else {
                const auto hp = predict_neurosvm(body, x);
                return {hp.label, hp.score};
            }
        },
        m.body);
}

Prediction predict(const TrainedModel &m, const Record &r) {
    return predict_features(m, feature_vector(r, m.columns, Schema::ilpd()));
}

}  // namespace neurosvm
