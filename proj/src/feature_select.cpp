#include "neurosvm/feature_select.hpp"

#include "neurosvm/error.hpp"
#include "neurosvm/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neurosvm {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("pearson needs two series of equal length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw ValidationError("pearson: zero-variance series");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const Dataset &d, std::span<const std::size_t> columns) {
    CorrelationMatrix cm;
    cm.columns.assign(columns.begin(), columns.end());
    cm.feature_names = names_of(d.schema, columns);
    const Matrix x = to_matrix(d, columns);
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        cols.push_back(x.column(c));
        const auto &v = cols.back();
        if (v.size() < 2 || std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); })) {
            throw ValidationError("feature '" + cm.feature_names[c] + "' has zero variance");
        }
    }
    cm.r = Matrix(columns.size(), columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        cm.r(i, i) = 1.0;
        for (std::size_t j = i + 1; j < columns.size(); ++j) {
            const double r = pearson(cols[i], cols[j]);
            cm.r(i, j) = r;
            cm.r(j, i) = r;
        }
    }
    return cm;
}

CorrelationFilterResult correlation_filter(const Dataset &d, std::span<const std::size_t> candidates,
                                           double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("correlation threshold must lie in (0, 1]");
    }
    std::vector<std::size_t> numeric, passthrough;
    for (auto c : candidates) {
        (d.schema.attributes.at(c).kind == AttributeKind::numeric ? numeric : passthrough).push_back(c);
    }
    std::sort(numeric.begin(), numeric.end());

    CorrelationFilterResult res;
    if (numeric.size() >= 2) {
        const auto cm = pearson_matrix(d, numeric);
        std::vector<bool> alive(numeric.size(), true);
        const auto mean_abs = [&](std::size_t a) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t b = 0; b < numeric.size(); ++b) {
                if (b != a && alive[b]) {
                    sum += std::abs(cm.r(a, b));
                    ++count;
                }
            }
            return count > 0 ? sum / static_cast<double>(count) : 0.0;
        };
        while (true) {
            std::size_t bi = 0, bj = 0;
            double worst = -1.0;
            for (std::size_t i = 0; i < numeric.size(); ++i) {
                for (std::size_t j = i + 1; j < numeric.size(); ++j) {
                    if (alive[i] && alive[j] && std::abs(cm.r(i, j)) > worst) {
                        worst = std::abs(cm.r(i, j));
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (!(worst > threshold)) {
                break;
            }
            const double mi = mean_abs(bi);
            const double mj = mean_abs(bj);
            // bj has the larger column index, so it loses ties
            const std::size_t drop = mi > mj ? bi : bj;
            const std::size_t keep = drop == bi ? bj : bi;
            alive[drop] = false;
            res.removed.push_back({cm.feature_names[drop], cm.feature_names[keep], cm.r(bi, bj)});
        }
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            if (alive[i]) {
                res.kept.push_back(numeric[i]);
            }
        }
    } else {
        res.kept = numeric;
    }
    res.kept.insert(res.kept.end(), passthrough.begin(), passthrough.end());
    std::sort(res.kept.begin(), res.kept.end());
    return res;
}

std::string_view to_string(Decision d) noexcept {
    switch (d) {
    case Decision::confirmed:
        return "confirmed";
    case Decision::rejected:
        return "rejected";
    case Decision::tentative:
        return "tentative";
    }
    return "tentative";
}

namespace {

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial_half_sum(std::size_t from, std::size_t to, std::size_t trials) {
    const double log_half_n = static_cast<double>(trials) * std::log(0.5);
    double p = 0.0;
    for (std::size_t k = from; k <= to; ++k) {
        p += std::exp(log_choose(trials, k) + log_half_n);
    }
    return std::min(1.0, p);
}

constexpr std::uint64_t kForestStream = 0;
constexpr std::uint64_t kImportanceStream = 1;
constexpr std::uint64_t kShadowStreamBase = 2;

}  // namespace

double binomial_upper_tail(std::size_t hits, std::size_t trials) {
    if (hits > trials) {
        return 0.0;
    }
    return binomial_half_sum(hits, trials, trials);
}

double binomial_lower_tail(std::size_t hits, std::size_t trials) {
    return binomial_half_sum(0, std::min(hits, trials), trials);
}

std::vector<std::size_t> FeatureReport::columns_with(Decision d) const {
    std::vector<std::size_t> out;
    for (const auto &f : features) {
        if (f.decision == d) {
            out.push_back(f.column);
        }
    }
    return out;
}

std::vector<std::size_t> FeatureReport::selected_columns() const {
    auto out = columns_with(Decision::confirmed);
    if (out.empty()) {
        out = columns_with(Decision::tentative);
    }
    std::sort(out.begin(), out.end());
    return out;
}

FeatureReport boruta(const Dataset &d, std::span<const std::size_t> candidates, const BorutaConfig &config,
                     std::uint64_t seed) {
    if (d.size() < 5) {
        throw ValidationError("Boruta needs at least 5 records, got " + std::to_string(d.size()));
    }
    if (config.max_trials < 10) {
        throw ValidationError("Boruta needs max_trials >= 10");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw ValidationError("Boruta alpha must lie in (0, 1)");
    }
    if (candidates.empty()) {
        throw ValidationError("Boruta needs at least one candidate feature");
    }
    const Matrix real = to_matrix(d, candidates);
    const auto y = labels_of(d);
    const std::size_t n = real.rows();

    FeatureReport report;
    report.seed = seed;
    report.config = config;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        FeatureScore fs;
        fs.column = candidates[k];
        fs.name = d.schema.attributes.at(candidates[k]).name;
        report.features.push_back(fs);
    }
    std::vector<double> importance_sum(candidates.size(), 0.0);

    const auto undecided = [&] {
        return std::any_of(report.features.begin(), report.features.end(),
                           [](const FeatureScore &f) { return f.decision == Decision::tentative; });
    };

    for (std::size_t trial = 0; trial < config.max_trials && undecided(); ++trial) {
        std::vector<std::size_t> pool;
        for (std::size_t k = 0; k < report.features.size(); ++k) {
            if (report.features[k].decision != Decision::rejected) {
                pool.push_back(k);
            }
        }
        const std::size_t width = pool.size();
        const auto trial_seed = derive_seed(seed, trial);

        Matrix wide(n, 2 * width);
        std::vector<std::size_t> order(n);
        for (std::size_t p = 0; p < width; ++p) {
            for (std::size_t r = 0; r < n; ++r) {
                wide(r, p) = real(r, pool[p]);
                order[r] = r;
            }
            Rng rng(derive_seed(trial_seed, kShadowStreamBase + p));
            fisher_yates(std::span<std::size_t>(order), rng);
            for (std::size_t r = 0; r < n; ++r) {
                wide(r, width + p) = real(order[r], pool[p]);
            }
        }

        auto forest_cfg = config.forest;
        forest_cfg.kind = EnsembleKind::random_forest;
        const auto forest = train_ensemble(wide, y, forest_cfg, derive_seed(trial_seed, kForestStream));
        const auto imp = oob_permutation_importance(forest, wide, y, derive_seed(trial_seed, kImportanceStream));

        const double shadow_max = *std::max_element(imp.begin() + static_cast<std::ptrdiff_t>(width), imp.end());
        for (std::size_t p = 0; p < width; ++p) {
            auto &fs = report.features[pool[p]];
            ++fs.trials;
            importance_sum[pool[p]] += imp[p];
            if (imp[p] > shadow_max) {
                ++fs.hit_count;
            }
        }
        for (auto &fs : report.features) {
            if (fs.decision != Decision::tentative) {
                continue;
            }
            // two-sided test at alpha: each tail is compared against alpha / 2
            if (binomial_upper_tail(fs.hit_count, fs.trials) < config.alpha / 2.0) {
                fs.decision = Decision::confirmed;
            } else if (binomial_lower_tail(fs.hit_count, fs.trials) < config.alpha / 2.0) {
                fs.decision = Decision::rejected;
            }
        }
        report.trials_run = trial + 1;
    }

    double top = 0.0;
    for (std::size_t k = 0; k < report.features.size(); ++k) {
        auto &fs = report.features[k];
        fs.raw_importance = fs.trials > 0 ? importance_sum[k] / static_cast<double>(fs.trials) : 0.0;
        if (fs.decision != Decision::rejected) {
            top = std::max(top, fs.raw_importance);
        }
    }
    for (auto &fs : report.features) {
        fs.normalized_importance = top > 0.0 ? std::clamp(fs.raw_importance / top, 0.0, 1.0) : 0.0;
    }
    return report;
}

FeatureReport select_features(const Dataset &d, bool correlation_filter_enabled, const BorutaConfig &config,
                              std::uint64_t seed, double threshold) {
    const auto all = all_attribute_indices();
    std::vector<std::size_t> candidates = all;
    std::vector<CorrelationRemoval> removed;
    if (correlation_filter_enabled) {
        auto filtered = correlation_filter(d, all, threshold);
        candidates = std::move(filtered.kept);
        removed = std::move(filtered.removed);
    }
    auto report = boruta(d, candidates, config, seed);
    report.correlation_removed = std::move(removed);
    return report;
}

nlohmann::json to_json(const FeatureReport &r) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto &f : r.features) {
        features.push_back({{"name", f.name},
                            {"column", f.column},
                            {"raw_importance", f.raw_importance},
                            {"normalized_importance", f.normalized_importance},
                            {"decision", std::string(to_string(f.decision))},
                            {"hit_count", f.hit_count},
                            {"trials", f.trials}});
    }
    nlohmann::json removed = nlohmann::json::array();
    for (const auto &c : r.correlation_removed) {
        removed.push_back({{"feature", c.feature}, {"partner", c.partner}, {"r", c.r}});
    }
    return {{"format_version", FeatureReport::kFormatVersion},
            {"kind", "feature_report"},
            {"seed", r.seed},
            {"trials_run", r.trials_run},
            {"config",
             {{"max_trials", r.config.max_trials},
              {"alpha", r.config.alpha},
              {"trees", r.config.forest.trees},
              {"mtry", r.config.forest.mtry}}},
            {"correlation_removed", removed},
            {"features", features}};
}

}  // namespace neurosvm
