#include "neurosvm/error.hpp"
#include "neurosvm/evaluation.hpp"

#include "checks.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace neurosvm;

namespace {

constexpr Label P = Label::patient;
constexpr Label N = Label::non_patient;

}  // namespace

TEST(Metrics, HandEvaluatedRmseAndMape) {
    const std::vector<double> actual{1, 2, 1, 2}, predicted{1, 1, 2, 2};
    EXPECT_EQ(rmse(actual, predicted), std::sqrt(0.5));
    EXPECT_EQ(mape(actual, predicted), 0.375);
    const std::vector<double> a2{2, 2, 2}, p2{1, 1, 2};
    EXPECT_EQ(rmse(a2, p2), std::sqrt(2.0 / 3.0));
    EXPECT_EQ(mape(a2, p2), 1.0 / 3.0);
    EXPECT_EQ(rmse(actual, actual), 0.0);
    EXPECT_EQ(mape(actual, actual), 0.0);
}

TEST(Metrics, RejectMismatchedOrEmptyInput) {
    const std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(rmse(a, b), ValidationError);
    EXPECT_THROW(mape({}, {}), ValidationError);
    const std::vector<double> zero{0.0}, one{1.0};
    EXPECT_THROW(mape(zero, one), ValidationError);
}

TEST(Roc, TrapezoidAucEqualsPairCounting) {
    Rng rng(77);
    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t n = 4 + rng.below(17);
        std::vector<Label> y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i == 0 ? P : (i == 1 ? N : (rng.uniform01() < 0.5 ? P : N));
            // coarse scores so that ties occur
            s[i] = static_cast<double>(rng.below(6)) / 5.0;
        }
        const auto roc = roc_curve(y, s);
        EXPECT_NEAR(auc(roc), fixtures::pair_counting_auc(y, s), 1e-12) << instance;
    }
}

TEST(Roc, CurveIsMonotoneFromOriginToCorner) {
    Rng rng(5);
    for (int v = 0; v < 100; ++v) {
        const std::size_t n = 2 + rng.below(60);
        std::vector<Label> y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i % 2 == 0 ? P : N;
            s[i] = rng.uniform01() < 0.2 ? 0.5 : rng.uniform(-3.0, 3.0);
        }
        const auto roc = roc_curve(y, s);
        ASSERT_GE(roc.size(), 2u);
        EXPECT_EQ(roc.front(), (RocPoint{0.0, 0.0}));
        EXPECT_EQ(roc.back(), (RocPoint{1.0, 1.0}));
        for (std::size_t k = 1; k < roc.size(); ++k) {
            EXPECT_GE(roc[k].fpr, roc[k - 1].fpr);
            EXPECT_GE(roc[k].tpr, roc[k - 1].tpr);
        }
    }
}

TEST(Roc, PerfectAndReversedRankings) {
    const std::vector<Label> y{P, P, N, N};
    const std::vector<double> good{0.9, 0.8, 0.2, 0.1}, bad{0.1, 0.2, 0.8, 0.9}, flat{1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(auc(roc_curve(y, good)), 1.0);
    EXPECT_DOUBLE_EQ(auc(roc_curve(y, bad)), 0.0);
    EXPECT_DOUBLE_EQ(auc(roc_curve(y, flat)), 0.5);
    EXPECT_EQ(roc_curve(y, flat).size(), 2u);
}

TEST(Evaluate, ConfusionAccuracyAndErrors) {
    const std::vector<Label> actual{P, P, N, N, P};
    const std::vector<Prediction> pred{{P, 0.9}, {N, 0.4}, {N, 0.1}, {P, 0.6}, {P, 0.7}};
    const auto r = evaluate(actual, pred);
    EXPECT_EQ(r.n, 5u);
    EXPECT_EQ(r.confusion.counts[0][0], 2u);
    EXPECT_EQ(r.confusion.counts[0][1], 1u);
    EXPECT_EQ(r.confusion.counts[1][0], 1u);
    EXPECT_EQ(r.confusion.counts[1][1], 1u);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
    EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.0 / 5.0));
    EXPECT_DOUBLE_EQ(r.mape, (0.5 + 1.0) / 5.0);
    ASSERT_TRUE(r.auc.has_value());
    EXPECT_NEAR(*r.auc, 5.0 / 6.0, 1e-15);
}

TEST(Evaluate, SingleClassHasNoAuc) {
    const std::vector<Label> actual{P, P};
    const std::vector<Prediction> pred{{P, 0.9}, {N, 0.4}};
    const auto r = evaluate(actual, pred);
    EXPECT_FALSE(r.auc.has_value());
    EXPECT_TRUE(r.roc.empty());
}

TEST(Evaluate, JsonRoundTrip) {
    const std::vector<Label> actual{P, N, N, P};
    const std::vector<Prediction> pred{{P, 0.3}, {N, 0.1}, {P, 0.7}, {P, 0.9}};
    const auto r = evaluate(actual, pred);
    const auto back = evaluation_from_json(to_json(r));
    EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
}

TEST(CrossValidation, LeaveOneOutMatchesHandEnumeration) {
    const auto d = fixtures::synthetic_ilpd(24, 3);
    const auto cols = all_attribute_indices();
    const auto spec = TrainSpec::defaults(Algorithm::naive_bayes);
    const auto cv = cross_validate(spec, d, cols, d.size(), 5);
    ASSERT_EQ(cv.folds.size(), d.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (j != i) {
                rest.push_back(j);
            }
        }
        const auto m = train(spec, subset(d, rest), cols, 0);
        correct += predict(m, d.records[i]).label == *d.records[i].label;
    }
    EXPECT_EQ(cv.failed_folds, 0u);
    EXPECT_NEAR(cv.mean_accuracy, static_cast<double>(correct) / d.size(), 1e-12);
}

TEST(CrossValidation, FoldSizesAndDeterminism) {
    const auto d = fixtures::synthetic_ilpd(53, 4);
    const auto cols = all_attribute_indices();
    const auto spec = TrainSpec::defaults(Algorithm::svm);
    const auto a = cross_validate(spec, d, cols, 5, 8);
    ASSERT_EQ(a.folds.size(), 5u);
    std::size_t total = 0;
    for (const auto &f : a.folds) {
        EXPECT_EQ(f.train_size + f.test_size, 53u);
        total += f.test_size;
    }
    EXPECT_EQ(total, 53u);
    EXPECT_EQ(to_json(a).dump(), to_json(cross_validate(spec, d, cols, 5, 8)).dump());
}

TEST(CrossValidation, FailedFoldsAreReported) {
    // one patient among non-patients: the fold holding it trains on a single class
    auto d = fixtures::synthetic_ilpd(12, 4);
    for (auto &r : d.records) {
        r.label = N;
    }
    d.records[3].label = P;
    const auto cols = all_attribute_indices();
    const auto cv = cross_validate(TrainSpec::defaults(Algorithm::svm), d, cols, 3, 1);
    EXPECT_EQ(cv.folds.size(), 3u);
    EXPECT_EQ(cv.failed_folds, 1u);
}

TEST(Compare, FiveRowsWithPublishedReferenceLines) {
    const auto d = fixtures::synthetic_ilpd(240, 12, 3);
    CompareConfig cfg;
    cfg.features = std::vector<std::size_t>{0, 2, 3, 4, 5, 6};
    cfg.spec.forest = EnsembleConfig::random_forest(80);
    const auto t = compare_all(d, cfg);
    EXPECT_EQ(t.records_raw, 240u);
    EXPECT_EQ(t.records_clean, 237u);
    EXPECT_EQ(t.train_size, 158u);
    EXPECT_EQ(t.test_size, 79u);
    ASSERT_EQ(t.rows.size(), 5u);
    EXPECT_EQ(t.row(Algorithm::svm).reference_accuracy, 0.7622);
    EXPECT_EQ(t.row(Algorithm::neurosvm).reference_accuracy, 0.9883);
    EXPECT_FALSE(t.selection.has_value());
    for (const auto &r : t.rows) {
        EXPECT_EQ(r.test.n, 79u);
        EXPECT_EQ(r.train.n, 158u);
    }
    const auto j = to_json(t);
    EXPECT_EQ(j.at("rows").size(), 5u);
    EXPECT_EQ(j.dump(), to_json(compare_all(d, cfg)).dump());
    EXPECT_NE(render_text(t).find("Random Forest"), std::string::npos);
}

TEST(Compare, SelectionStageFeedsTheTable) {
    const auto d = fixtures::synthetic_ilpd(150, 13);
    CompareConfig cfg;
    cfg.boruta.max_trials = 20;
    cfg.boruta.forest = EnsembleConfig::random_forest(40);
    cfg.spec.forest = EnsembleConfig::random_forest(40);
    cfg.algorithms = {Algorithm::naive_bayes};
    const auto t = compare_all(d, cfg);
    ASSERT_TRUE(t.selection.has_value());
    EXPECT_EQ(t.features, names_of(d.schema, resolve_columns(*t.selection)));
    EXPECT_EQ(t.rows.size(), 1u);
}
