#include "cli.hpp"

#include "neurosvm/error.hpp"
#include "neurosvm/evaluation.hpp"
#include "neurosvm/persistence.hpp"
#include "neurosvm/service.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace neurosvm::cli {

namespace {

using nlohmann::json;

struct Options {
    std::string data;
    std::uint64_t seed = 7;
    std::string algorithm = "svm";
    std::string store = "models";
    double split_fraction = kDefaultSplitFraction;
    std::size_t folds = 10;
    bool no_corr_filter = false;
    std::string out;
    std::string format = "text";
    std::string model;
    std::string features;
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::vector<std::string> split_names(const std::string &s) {
    std::vector<std::string> names;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) {
            names.push_back(item.substr(b, e - b + 1));
        }
    }
    return names;
}

CompareConfig compare_config(const Options &o) {
    CompareConfig c;
    c.seed = o.seed;
    c.split_fraction = o.split_fraction;
    c.correlation_filter = !o.no_corr_filter;
    if (!o.features.empty()) {
        const auto names = split_names(o.features);
        c.features = indices_of(Schema::ilpd(), names);
    }
    return c;
}

void emit(const Options &o, std::ostream &out, const json &j, const std::string &text) {
    const std::string body = o.format == "json" ? j.dump() + "\n" : text;
    if (o.out.empty()) {
        out << body;
    } else {
        write_file_atomic(o.out, body);
    }
}

int cmd_train(const Options &o, std::ostream &out) {
    const auto raw = load_ilpd(o.data);
    const auto a = parse_algorithm(o.algorithm);
    const auto prepared = prepare(raw, compare_config(o));
    const auto model = train(TrainSpec::defaults(a), prepared.parts.train, prepared.columns, training_seed(o.seed, a));
    const auto test = evaluate_model(model, prepared.parts.test);
    ModelStore store(o.store);
    const auto id = store.save(model);
    store.save_metrics(id, test);

    json j{{"model_id", id},
           {"algorithm", std::string(to_string(a))},
           {"features", model.features},
           {"train_size", prepared.parts.train.size()},
           {"test_size", prepared.parts.test.size()},
           {"test", to_json(test)}};
    std::ostringstream text;
    text << "model_id " << id << '\n' << "algorithm " << display_name(a) << '\n' << "features";
    for (const auto &f : model.features) {
        text << ' ' << f;
    }
    text << "\ntest set: " << render_text(test);
    emit(o, out, j, text.str());
    return 0;
}

int cmd_select(const Options &o, std::ostream &out) {
    const auto clean = handle_missing(load_ilpd(o.data));
    const auto report = select_features(clean, !o.no_corr_filter, BorutaConfig{}, selection_seed(o.seed));
    emit(o, out, to_json(report), render_text(report));
    return 0;
}

int cmd_evaluate(const Options &o, std::ostream &out) {
    const auto raw = load_ilpd(o.data);
    if (!o.model.empty()) {
        ModelStore store(o.store);
        const auto model = store.load(o.model);
        const auto report = evaluate_model(model, handle_missing(raw));
        store.save_metrics(o.model, report);
        emit(o, out, to_json(report), render_text(report));
        return 0;
    }
    const auto a = parse_algorithm(o.algorithm);
    auto config = compare_config(o);
    const auto clean = handle_missing(raw);
    std::vector<std::size_t> columns;
    if (config.features) {
        columns = *config.features;
    } else {
        columns = resolve_columns(select_features(clean, config.correlation_filter, config.boruta,
                                                  selection_seed(o.seed), config.correlation_threshold));
    }
    const auto report = cross_validate(TrainSpec::defaults(a), clean, columns, o.folds, o.seed);
    emit(o, out, to_json(report), render_text(report));
    return 0;
}

int cmd_compare(const Options &o, std::ostream &out) {
    const auto table = compare_all(load_ilpd(o.data), compare_config(o));
    emit(o, out, to_json(table), render_text(table));
    return 0;
}

int cmd_predict(const Options &o, std::istream &in, std::ostream &out, std::ostream &err) {
    const std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    json req;
    try {
        req = json::parse(body);
    } catch (const json::parse_error &e) {
        err << errors_json({{"", "malformed_json", e.what()}}).dump() << '\n';
        return 1;
    }
    const json &attrs = req.is_object() && req.contains("attributes") ? req["attributes"] : req;
    auto parsed = parse_attributes(attrs);
    if (auto *errors = std::get_if<std::vector<FieldError>>(&parsed)) {
        err << errors_json(*errors).dump() << '\n';
        return 1;
    }
    ModelStore store(o.store);
    const auto model = store.load(o.model);
    const auto p = predict(model, std::get<Record>(parsed));
    out << prediction_json(p, o.model, model.algorithm).dump() << '\n';
    return 0;
}

int cmd_serve(const Options &o, std::ostream &out, std::ostream &err) {
    const PredictionService service{ModelStore(o.store)};
    out << "serving " << service.model_count() << " model(s) from " << o.store << " on http://" << o.host << ':'
        << o.port << std::endl;
    if (!serve(service, o.host, o.port)) {
        err << "cannot listen on " << o.host << ':' << o.port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err) {
    Options o;
    CLI::App app{"Liver patient screening: ILPD ingestion, feature selection, classifiers and prediction service",
                 "neurosvm"};
    app.require_subcommand(1);
    const std::vector<std::string> algorithms{"nb", "bagging", "rf", "svm", "neurosvm"};

    auto data = [&](CLI::App *c) { c->add_option("--data", o.data, "ILPD CSV file")->required()->check(CLI::ExistingFile); };
    auto seed = [&](CLI::App *c) { c->add_option("--seed", o.seed, "base seed")->capture_default_str(); };
    auto output = [&](CLI::App *c) {
        c->add_option("--out", o.out, "write output to this file instead of stdout");
        c->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    };
    auto selection = [&](CLI::App *c) {
        c->add_flag("--no-corr-filter", o.no_corr_filter, "skip the correlation filter before Boruta");
        c->add_option("--features", o.features, "comma-separated attribute names; skips feature selection");
    };

    auto *train_cmd = app.add_subcommand("train", "select features, train one algorithm, save it to the store");
    data(train_cmd);
    seed(train_cmd);
    output(train_cmd);
    selection(train_cmd);
    train_cmd->add_option("--algorithm", o.algorithm, "nb|bagging|rf|svm|neurosvm")
        ->check(CLI::IsMember(algorithms))
        ->capture_default_str();
    train_cmd->add_option("--store", o.store, "model store directory")->capture_default_str();
    train_cmd->add_option("--split-fraction", o.split_fraction, "training fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto *select_cmd = app.add_subcommand("select-features", "run the correlation filter and Boruta");
    data(select_cmd);
    seed(select_cmd);
    output(select_cmd);
    select_cmd->add_flag("--no-corr-filter", o.no_corr_filter, "skip the correlation filter before Boruta");

    auto *eval_cmd = app.add_subcommand("evaluate", "k-fold cross-validation, or score a stored model with --model");
    data(eval_cmd);
    seed(eval_cmd);
    output(eval_cmd);
    selection(eval_cmd);
    eval_cmd->add_option("--algorithm", o.algorithm, "nb|bagging|rf|svm|neurosvm")
        ->check(CLI::IsMember(algorithms))
        ->capture_default_str();
    eval_cmd->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(2, 100000))->capture_default_str();
    eval_cmd->add_option("--store", o.store, "model store directory")->capture_default_str();
    eval_cmd->add_option("--model", o.model, "stored model id; its metrics are written back to the store");

    auto *compare_cmd = app.add_subcommand("compare", "train and evaluate all five algorithms on one split");
    data(compare_cmd);
    seed(compare_cmd);
    output(compare_cmd);
    selection(compare_cmd);
    compare_cmd->add_option("--split-fraction", o.split_fraction, "training fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    auto *predict_cmd = app.add_subcommand("predict", "predict one record read as JSON from stdin");
    predict_cmd->add_option("--store", o.store, "model store directory")->capture_default_str();
    predict_cmd->add_option("--model", o.model, "model id")->required();

    auto *serve_cmd = app.add_subcommand("serve", "HTTP JSON API over a model store");
    serve_cmd->add_option("--store", o.store, "model store directory")->capture_default_str();
    serve_cmd->add_option("--host", o.host, "bind address")->capture_default_str();
    serve_cmd->add_option("--port", o.port, "TCP port")->check(CLI::Range(0, 65535))->capture_default_str();

    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*train_cmd) {
            return cmd_train(o, out);
        }
        if (*select_cmd) {
            return cmd_select(o, out);
        }
        if (*eval_cmd) {
            return cmd_evaluate(o, out);
        }
        if (*compare_cmd) {
            return cmd_compare(o, out);
        }
        if (*predict_cmd) {
            return cmd_predict(o, in, out, err);
        }
        if (*serve_cmd) {
            return cmd_serve(o, out, err);
        }
    } catch (const SolverError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NotFoundError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const IntegrityError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const VersionError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace neurosvm::cli
