#include "neurosvm/evaluation.hpp"

#include "neurosvm/error.hpp"
#include "neurosvm/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace neurosvm {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p, const char *what) {
    if (a.size() != p.size()) {
        throw ValidationError(std::string(what) + ": length mismatch");
    }
    if (a.empty()) {
        throw ValidationError(std::string(what) + ": empty input");
    }
}

std::size_t slot(Label l) { return l == Label::patient ? 0 : 1; }

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "rmse");
    double ss = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(actual.size()));
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "mape");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw ValidationError("mape: actual value " + std::to_string(i) + " is zero");
        }
        sum += std::abs(actual[i] - predicted[i]) / actual[i];
    }
    return sum / static_cast<double>(actual.size());
}

std::vector<RocPoint> roc_curve(std::span<const Label> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw ValidationError("roc: length mismatch");
    }
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::patient));
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) {
        throw ValidationError("roc: both classes must be present");
    }
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> pts{{0.0, 0.0}};
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == Label::patient ? tp : fp) += 1;
            ++i;
        }
        pts.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    }
    if (pts.back() != RocPoint{1.0, 1.0}) {
        pts.push_back({1.0, 1.0});
    }
    return pts;
}

double auc(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
    }
    return area;
}

std::size_t Confusion::total() const noexcept {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

EvaluationReport evaluate(std::span<const Label> actual, std::span<const Prediction> predicted) {
    if (actual.size() != predicted.size() || actual.empty()) {
        throw ValidationError("evaluation needs one prediction per label and at least one record");
    }
    EvaluationReport r;
    r.n = actual.size();
    std::vector<double> a(r.n), p(r.n), scores(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        ++r.confusion.counts[slot(actual[i])][slot(predicted[i].label)];
        a[i] = to_int(actual[i]);
        p[i] = to_int(predicted[i].label);
        scores[i] = predicted[i].score;
    }
    r.accuracy = static_cast<double>(r.confusion.correct()) / static_cast<double>(r.n);
    r.rmse = rmse(a, p);
    r.mape = mape(a, p);
    const bool both = std::find(actual.begin(), actual.end(), Label::patient) != actual.end() &&
                      std::find(actual.begin(), actual.end(), Label::non_patient) != actual.end();
    if (both) {
        r.roc = roc_curve(actual, scores);
        r.auc = auc(r.roc);
    }
    return r;
}

EvaluationReport evaluate_model(const TrainedModel &m, const Dataset &d) {
    const auto y = labels_of(d);
    std::vector<Prediction> preds;
    preds.reserve(d.size());
    for (const auto &rec : d.records) {
        preds.push_back(predict(m, rec));
    }
    return evaluate(y, preds);
}

CrossValidationReport cross_validate(const TrainSpec &spec, const Dataset &d, std::span<const std::size_t> columns,
                                     std::size_t k, std::uint64_t seed) {
    const auto folds = kfold_plan(d.size(), k, seed);
    CrossValidationReport out;
    std::vector<double> accs;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) {
                train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
            }
        }
        std::sort(train_idx.begin(), train_idx.end());
        FoldResult fr;
        fr.fold = f;
        fr.train_size = train_idx.size();
        fr.test_size = folds[f].size();
        try {
            const auto model = train(spec, subset(d, train_idx), columns, derive_seed(seed, f + 1));
            fr.report = evaluate_model(model, subset(d, folds[f]));
            accs.push_back(fr.report.accuracy);
        } catch (const Error &e) {
            fr.failed = true;
            fr.error = e.what();
            ++out.failed_folds;
        }
        out.folds.push_back(std::move(fr));
    }
    if (!accs.empty()) {
        out.mean_accuracy = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
        if (accs.size() > 1) {
            double ss = 0.0;
            for (auto a : accs) {
                ss += (a - out.mean_accuracy) * (a - out.mean_accuracy);
            }
            out.stddev_accuracy = std::sqrt(ss / static_cast<double>(accs.size() - 1));
        }
    }
    return out;
}

double reference_accuracy(Algorithm a) {
    for (const auto &p : kReferenceAccuracies) {
        if (p.algorithm == a) {
            return p.accuracy;
        }
    }
    return 0.0;
}

const ComparisonRow &ComparisonTable::row(Algorithm a) const {
    for (const auto &r : rows) {
        if (r.algorithm == a) {
            return r;
        }
    }
    throw NotFoundError("comparison has no row for " + std::string(to_string(a)));
}

std::uint64_t selection_seed(std::uint64_t seed) { return derive_seed(seed, 1000); }

std::uint64_t training_seed(std::uint64_t seed, Algorithm a) {
    return derive_seed(seed, 2000 + static_cast<std::uint64_t>(a));
}

std::vector<std::size_t> resolve_columns(const FeatureReport &r) {
    auto columns = r.selected_columns();
    if (columns.empty()) {
        for (const auto &f : r.features) {
            columns.push_back(f.column);
        }
        std::sort(columns.begin(), columns.end());
    }
    return columns;
}

PreparedData prepare(const Dataset &raw, const CompareConfig &config) {
    PreparedData p;
    p.clean = handle_missing(raw, MissingPolicy::drop_record);
    if (config.features) {
        p.columns = *config.features;
    } else {
        p.selection = select_features(p.clean, config.correlation_filter, config.boruta, selection_seed(config.seed),
                                      config.correlation_threshold);
        p.columns = resolve_columns(*p.selection);
    }
    p.parts = split(p.clean, config.split_fraction, config.seed);
    return p;
}

ComparisonTable compare_all(const Dataset &raw, const CompareConfig &config) {
    auto prepared = prepare(raw, config);
    ComparisonTable t;
    t.seed = config.seed;
    t.records_raw = raw.size();
    t.records_clean = prepared.clean.size();
    t.features = names_of(prepared.clean.schema, prepared.columns);
    t.selection = std::move(prepared.selection);
    t.train_size = prepared.parts.train.size();
    t.test_size = prepared.parts.test.size();

    for (const auto a : config.algorithms) {
        TrainSpec spec = config.spec;
        spec.algorithm = a;
        const auto model = train(spec, prepared.parts.train, prepared.columns, training_seed(config.seed, a));
        t.rows.push_back({a, evaluate_model(model, prepared.parts.test), evaluate_model(model, prepared.parts.train),
                          reference_accuracy(a)});
    }
    return t;
}

nlohmann::json to_json(const EvaluationReport &r) {
    nlohmann::json roc = nlohmann::json::array();
    for (const auto &p : r.roc) {
        roc.push_back({p.fpr, p.tpr});
    }
    return {{"format_version", EvaluationReport::kFormatVersion},
            {"kind", "evaluation_report"},
            {"n", r.n},
            {"accuracy", r.accuracy},
            {"confusion", {{r.confusion.counts[0][0], r.confusion.counts[0][1]}, {r.confusion.counts[1][0], r.confusion.counts[1][1]}}},
            {"rmse", r.rmse},
            {"mape", r.mape},
            {"roc", roc},
            {"auc", r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr)}};
}

EvaluationReport evaluation_from_json(const nlohmann::json &j) {
    EvaluationReport r;
    r.n = j.at("n").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    const auto &c = j.at("confusion");
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t p = 0; p < 2; ++p) {
            r.confusion.counts[a][p] = c.at(a).at(p).get<std::size_t>();
        }
    }
    r.rmse = j.at("rmse").get<double>();
    r.mape = j.at("mape").get<double>();
    for (const auto &p : j.at("roc")) {
        r.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    if (!j.at("auc").is_null()) {
        r.auc = j.at("auc").get<double>();
    }
    return r;
}

nlohmann::json to_json(const CrossValidationReport &r) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto &f : r.folds) {
        nlohmann::json jf = {{"fold", f.fold}, {"train_size", f.train_size}, {"test_size", f.test_size}, {"failed", f.failed}};
        if (f.failed) {
            jf["error"] = f.error;
        } else {
            jf["report"] = to_json(f.report);
        }
        folds.push_back(std::move(jf));
    }
    return {{"format_version", 1},
            {"kind", "cross_validation"},
            {"folds", folds},
            {"failed_folds", r.failed_folds},
            {"mean_accuracy", r.mean_accuracy},
            {"stddev_accuracy", r.stddev_accuracy}};
}

nlohmann::json to_json(const ComparisonTable &t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &r : t.rows) {
        rows.push_back({{"algorithm", std::string(to_string(r.algorithm))},
                        {"name", std::string(display_name(r.algorithm))},
                        {"test", to_json(r.test)},
                        {"train", to_json(r.train)},
                        {"reference_accuracy", r.reference_accuracy}});
    }
    nlohmann::json j = {{"format_version", ComparisonTable::kFormatVersion},
                        {"kind", "comparison_table"},
                        {"seed", t.seed},
                        {"records_raw", t.records_raw},
                        {"records_clean", t.records_clean},
                        {"train_size", t.train_size},
                        {"test_size", t.test_size},
                        {"features", t.features},
                        {"rows", rows}};
    j["selection"] = t.selection ? to_json(*t.selection) : nlohmann::json(nullptr);
    return j;
}

namespace {

std::string fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

}  // namespace

std::string render_text(const ComparisonTable &t) {
    std::ostringstream out;
    out << "records: " << t.records_raw << " raw, " << t.records_clean << " complete; train " << t.train_size
        << ", test " << t.test_size << "; seed " << t.seed << '\n';
    out << "features:";
    for (const auto &f : t.features) {
        out << ' ' << f;
    }
    out << "\n\n";
    out << pad("Algorithm", 24) << pad("Test acc (%)", 14) << pad("Train acc (%)", 15) << pad("RMSE", 9)
        << pad("MAPE", 9) << pad("AUC", 9) << "Published (%)\n";
    for (const auto &r : t.rows) {
        out << pad(std::string(display_name(r.algorithm)), 24) << pad(fixed(100.0 * r.test.accuracy, 2), 14)
            << pad(fixed(100.0 * r.train.accuracy, 2), 15) << pad(fixed(r.test.rmse, 4), 9)
            << pad(fixed(r.test.mape, 4), 9) << pad(r.test.auc ? fixed(*r.test.auc, 4) : "n/a", 9)
            << fixed(100.0 * r.reference_accuracy, 2) << '\n';
    }
    return out.str();
}

std::string render_text(const CrossValidationReport &r) {
    std::ostringstream out;
    for (const auto &f : r.folds) {
        out << "fold " << f.fold << ": ";
        if (f.failed) {
            out << "FAILED (" << f.error << ")\n";
        } else {
            out << "accuracy " << fixed(100.0 * f.report.accuracy, 2) << "% on " << f.test_size << " records\n";
        }
    }
    out << "mean accuracy " << fixed(100.0 * r.mean_accuracy, 2) << "% (sd " << fixed(100.0 * r.stddev_accuracy, 2)
        << "), failed folds: " << r.failed_folds << '\n';
    return out.str();
}

std::string render_text(const EvaluationReport &r) {
    std::ostringstream out;
    out << "records " << r.n << ", accuracy " << fixed(100.0 * r.accuracy, 2) << "%, RMSE " << fixed(r.rmse, 4)
        << ", MAPE " << fixed(r.mape, 4) << ", AUC " << (r.auc ? fixed(*r.auc, 4) : "n/a") << '\n';
    out << "confusion (rows actual 1/2, columns predicted 1/2): " << r.confusion.counts[0][0] << ' '
        << r.confusion.counts[0][1] << " / " << r.confusion.counts[1][0] << ' ' << r.confusion.counts[1][1] << '\n';
    return out.str();
}

std::string render_text(const FeatureReport &r) {
    std::ostringstream out;
    for (const auto &c : r.correlation_removed) {
        out << "removed " << c.feature << " (|r| " << fixed(std::abs(c.r), 3) << " with " << c.partner << ")\n";
    }
    out << "trials: " << r.trials_run << ", seed " << r.seed << "\n\n";
    out << pad("Feature", 12) << pad("Decision", 12) << pad("Hits", 10) << pad("Importance", 13) << "Normalized\n";
    for (const auto &f : r.features) {
        out << pad(f.name, 12) << pad(std::string(to_string(f.decision)), 12)
            << pad(std::to_string(f.hit_count) + "/" + std::to_string(f.trials), 10)
            << pad(fixed(f.raw_importance, 5), 13) << fixed(f.normalized_importance, 3) << '\n';
    }
    return out.str();
}

}  // namespace neurosvm
