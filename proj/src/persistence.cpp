#include "neurosvm/persistence.hpp"

#include "neurosvm/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace neurosvm {

using nlohmann::json;

namespace {

void require_finite(const json &j, const std::string &path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw ValidationError("cannot serialize non-finite number at " + path);
    }
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) {
            require_finite(v, path + "." + k);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            require_finite(j[i], path + "[" + std::to_string(i) + "]");
        }
    }
}

bool is_model_id(const std::string &s) {
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string_view kind_name(Kernel::Type t) { return t == Kernel::Type::linear ? "linear" : "rbf"; }

Kernel::Type parse_kernel(const std::string &s) {
    if (s == "linear") {
        return Kernel::Type::linear;
    }
    if (s == "rbf") {
        return Kernel::Type::rbf;
    }
    throw ValidationError("unknown kernel '" + s + "'");
}

json matrix_json(const Matrix &m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

Matrix matrix_from(const json &j, std::size_t rows, std::size_t cols) {
    if (j.size() != rows) {
        throw IntegrityError("matrix row count mismatch");
    }
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto &row = j.at(r);
        if (row.size() != cols) {
            throw IntegrityError("matrix column count mismatch");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = row.at(c).get<double>();
        }
    }
    return m;
}

json svm_json(const SvmModel &s) {
    json support = json::array();
    for (const auto &sv : s.support) {
        support.push_back({{"x", sv.x}, {"y", sv.y}, {"alpha", sv.alpha}});
    }
    return {{"kernel", std::string(kind_name(s.kernel.type))},
            {"gamma", s.kernel.gamma},
            {"C", s.C},
            {"bias", s.bias},
            {"support", support}};
}

json scaling_json(const ScalingParams &p) { return {{"mean", p.mean}, {"stddev", p.stddev}}; }

ScalingParams scaling_from(const json &j) {
    ScalingParams p;
    p.mean = j.at("mean").get<std::vector<double>>();
    p.stddev = j.at("stddev").get<std::vector<double>>();
    return p;
}

SvmModel svm_from(const json &j, const json &scaling) {
    SvmModel s;
    s.kernel.type = parse_kernel(j.at("kernel").get<std::string>());
    s.kernel.gamma = j.at("gamma").get<double>();
    s.C = j.at("C").get<double>();
    s.bias = j.at("bias").get<double>();
    for (const auto &sv : j.at("support")) {
        s.support.push_back({sv.at("x").get<std::vector<double>>(), sv.at("y").get<int>(), sv.at("alpha").get<double>()});
    }
    s.scaling = scaling_from(scaling);
    return s;
}

json network_json(const NetworkWeights &n) {
    json layers = json::array();
    for (const auto &l : n.layers) {
        layers.push_back({{"weights", matrix_json(l.weights)}, {"thresholds", l.thresholds}});
    }
    return {{"architecture", n.architecture},
            {"activation", n.activation == Activation::logistic ? "logistic" : "step"},
            {"layers", layers}};
}

NetworkWeights network_from(const json &j) {
    const auto act = j.at("activation").get<std::string>();
    auto n = make_network(j.at("architecture").get<std::vector<std::size_t>>(),
                          act == "step" ? Activation::step : Activation::logistic);
    const auto &layers = j.at("layers");
    if (layers.size() != n.layers.size()) {
        throw IntegrityError("network layer count mismatch");
    }
    for (std::size_t l = 0; l < n.layers.size(); ++l) {
        auto &layer = n.layers[l];
        layer.weights = matrix_from(layers[l].at("weights"), layer.weights.rows(), layer.weights.cols());
        layer.thresholds = layers[l].at("thresholds").get<std::vector<double>>();
        if (layer.thresholds.size() != layer.weights.rows()) {
            throw IntegrityError("network threshold count mismatch");
        }
    }
    return n;
}

json tree_json(const DecisionTree &t) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         label = json::array(), counts = json::array();
    for (const auto &n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        label.push_back(to_int(n.label));
        counts.push_back({n.counts[0], n.counts[1]});
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left},
            {"right", right},     {"label", label},         {"counts", counts}};
}

DecisionTree tree_from(const json &j) {
    DecisionTree t;
    const auto &feature = j.at("feature");
    t.nodes.resize(feature.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        auto &n = t.nodes[i];
        n.feature = feature.at(i).get<std::int32_t>();
        n.threshold = j.at("threshold").at(i).get<double>();
        n.left = j.at("left").at(i).get<std::int32_t>();
        n.right = j.at("right").at(i).get<std::int32_t>();
        n.label = j.at("label").at(i).get<int>() == 1 ? Label::patient : Label::non_patient;
        n.counts = {j.at("counts").at(i).at(0).get<std::uint32_t>(), j.at("counts").at(i).at(1).get<std::uint32_t>()};
        const auto limit = static_cast<std::int32_t>(t.nodes.size());
        if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= limit || n.right >= limit)) {
            throw IntegrityError("tree node references an invalid child");
        }
    }
    return t;
}

json svm_hyper(const SvmConfig &c) {
    return {{"kernel", std::string(kind_name(c.kernel))},
            {"gamma", c.gamma},
            {"C", c.C},
            {"tol", c.tol},
            {"max_passes", c.max_passes}};
}

SvmConfig svm_hyper_from(const json &j) {
    SvmConfig c;
    c.kernel = parse_kernel(j.at("kernel").get<std::string>());
    c.gamma = j.at("gamma").get<double>();
    c.C = j.at("C").get<double>();
    c.tol = j.at("tol").get<double>();
    c.max_passes = j.at("max_passes").get<std::size_t>();
    return c;
}

}  // namespace

std::string canonical_dump(const json &j) {
    require_finite(j, "$");
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

json model_hyperparameters(const TrainedModel &m) {
    switch (m.algorithm) {
    case Algorithm::naive_bayes:
        return json::object();
    case Algorithm::bagging:
        return {{"trees", m.spec.bagging.trees}};
    case Algorithm::random_forest:
        return {{"trees", m.spec.forest.trees}, {"mtry", m.spec.forest.mtry}};
    case Algorithm::svm:
        return svm_hyper(m.spec.svm);
    case Algorithm::neurosvm:
        return {{"svm", svm_hyper(m.spec.svm)},
                {"network",
                 {{"hidden", m.spec.net.hidden},
                  {"rate", m.spec.net.rate},
                  {"max_epochs", m.spec.net.max_epochs},
                  {"grad_norm_stop", m.spec.net.grad_norm_stop}}}};
    }
    return json::object();
}

json model_parameters(const TrainedModel &m) {
    return std::visit(
        [&](const auto &body) -> json {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                json classes = json::array();
                for (const auto &c : body.classes) {
                    classes.push_back(
                        {{"prior", c.prior}, {"present", c.present}, {"mean", c.mean}, {"variance", c.variance}});
                }
                return {{"classes", classes}, {"variance_floor", body.variance_floor}};
            } else if constexpr (std::is_same_v<T, EnsembleModel>) {
                json trees = json::array();
                for (const auto &t : body.trees) {
                    trees.push_back(tree_json(t));
                }
                return {{"kind", body.kind == EnsembleKind::bagging ? "bagging" : "random_forest"},
                        {"trees", trees},
                        {"tree_seeds", body.tree_seeds},
                        {"mtry", body.mtry},
                        {"feature_count", body.feature_count},
                        {"train_size", body.train_size},
                        {"oob_error", body.oob_error ? json(*body.oob_error) : json(nullptr)}};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                return svm_json(body);
            } else {
                std::vector<std::string> recipe;
                for (auto r : body.recipe) {
                    recipe.emplace_back(r == HybridInput::decision_value ? "decision_value" : "label");
                }
                return {{"svm", svm_json(body.svm)},
                        {"network", network_json(body.network)},
                        {"recipe", recipe},
                        {"threshold", body.threshold}};
            }
        },
        m.body);
}

json model_scaling(const TrainedModel &m) {
    if (const auto *s = std::get_if<SvmModel>(&m.body)) {
        return scaling_json(s->scaling);
    }
    if (const auto *h = std::get_if<HybridModel>(&m.body)) {
        return scaling_json(h->svm.scaling);
    }
    return nullptr;
}

json model_payload(const TrainedModel &m) {
    return {{"format_version", kModelFormatVersion},
            {"algorithm", std::string(to_string(m.algorithm))},
            {"schema_fingerprint", Schema::ilpd().fingerprint()},
            {"hyperparameters", model_hyperparameters(m)},
            {"parameters", model_parameters(m)},
            {"scaling", model_scaling(m)},
            {"features", m.features}};
}

std::string compute_model_id(const TrainedModel &m) { return sha256_hex(canonical_dump(model_payload(m))); }

json model_document(const TrainedModel &m, const std::string &created_at) {
    json doc = model_payload(m);
    doc["model_id"] = sha256_hex(canonical_dump(doc));
    doc["created_at"] = created_at;
    doc["integrity"] = sha256_hex(canonical_dump(doc));
    return doc;
}

TrainedModel model_from_document(const json &doc) {
    TrainedModel m;
    m.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    m.spec.algorithm = m.algorithm;
    m.features = doc.at("features").get<std::vector<std::string>>();
    m.columns = indices_of(Schema::ilpd(), m.features);
    const auto &hp = doc.at("hyperparameters");
    const auto &p = doc.at("parameters");
    const auto &scaling = doc.at("scaling");

    switch (m.algorithm) {
    case Algorithm::naive_bayes: {
        NaiveBayesModel nb;
        nb.variance_floor = p.at("variance_floor").get<double>();
        for (std::size_t k = 0; k < 2; ++k) {
            const auto &c = p.at("classes").at(k);
            nb.classes[k] = {c.at("prior").get<double>(), c.at("present").get<bool>(),
                             c.at("mean").get<std::vector<double>>(), c.at("variance").get<std::vector<double>>()};
        }
        m.body = std::move(nb);
        break;
    }
    case Algorithm::bagging:
    case Algorithm::random_forest: {
        EnsembleModel e;
        e.kind = p.at("kind").get<std::string>() == "bagging" ? EnsembleKind::bagging : EnsembleKind::random_forest;
        for (const auto &t : p.at("trees")) {
            e.trees.push_back(tree_from(t));
        }
        e.tree_seeds = p.at("tree_seeds").get<std::vector<std::uint64_t>>();
        e.mtry = p.at("mtry").get<std::size_t>();
        e.feature_count = p.at("feature_count").get<std::size_t>();
        e.train_size = p.at("train_size").get<std::size_t>();
        if (!p.at("oob_error").is_null()) {
            e.oob_error = p.at("oob_error").get<double>();
        }
        auto &cfg = m.algorithm == Algorithm::bagging ? m.spec.bagging : m.spec.forest;
        cfg.kind = e.kind;
        cfg.trees = hp.at("trees").get<std::size_t>();
        if (m.algorithm == Algorithm::random_forest) {
            cfg.mtry = hp.at("mtry").get<std::size_t>();
        }
        m.body = std::move(e);
        break;
    }
    case Algorithm::svm:
        m.spec.svm = svm_hyper_from(hp);
        m.body = svm_from(p, scaling);
        break;
    case Algorithm::neurosvm: {
        m.spec.svm = svm_hyper_from(hp.at("svm"));
        const auto &net = hp.at("network");
        m.spec.net.hidden = net.at("hidden").get<std::vector<std::size_t>>();
        m.spec.net.rate = net.at("rate").get<double>();
        m.spec.net.max_epochs = net.at("max_epochs").get<std::size_t>();
        m.spec.net.grad_norm_stop = net.at("grad_norm_stop").get<double>();
        HybridModel h;
        h.svm = svm_from(p.at("svm"), scaling);
        h.network = network_from(p.at("network"));
        h.recipe.clear();
        for (const auto &r : p.at("recipe")) {
            h.recipe.push_back(r.get<std::string>() == "label" ? HybridInput::label : HybridInput::decision_value);
        }
        h.threshold = p.at("threshold").get<double>();
        if (h.recipe.size() != h.network.inputs()) {
            throw IntegrityError("hybrid recipe length differs from network input width");
        }
        m.body = std::move(h);
        break;
    }
    }
    return m;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

json ModelEnvelope::to_json() const {
    return {{"format_version", format_version},
            {"model_id", model_id},
            {"algorithm", std::string(to_string(algorithm))},
            {"schema_fingerprint", schema_fingerprint},
            {"hyperparameters", hyperparameters},
            {"created_at", created_at},
            {"features", features}};
}

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            throw Error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

ModelStore::ModelStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ModelStore::model_path(const std::string &model_id) const {
    if (!is_model_id(model_id)) {
        throw NotFoundError("unknown model '" + model_id + "'");
    }
    return root_ / (model_id + ".json");
}

std::string ModelStore::save(const TrainedModel &m, std::optional<std::string> created_at) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) {
        throw Error("model store '" + root_.string() + "' is not a writable directory");
    }
    const auto doc = model_document(m, created_at ? *created_at : utc_timestamp_now());
    const auto id = doc.at("model_id").get<std::string>();
    const auto path = model_path(id);
    if (!std::filesystem::exists(path) || created_at) {
        write_file_atomic(path, canonical_dump(doc));
    }
    rebuild_index();
    return id;
}

json ModelStore::read_verified(const std::string &model_id) const {
    const auto path = model_path(model_id);
    if (!std::filesystem::exists(path)) {
        throw NotFoundError("unknown model '" + model_id + "'");
    }
    const auto bytes = read_file(path);
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception &e) {
        throw IntegrityError("model " + model_id + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
        throw IntegrityError("model " + model_id + " has no format_version");
    }
    const int version = doc["format_version"].get<int>();
    if (version > kModelFormatVersion) {
        throw VersionError("model " + model_id + " uses format " + std::to_string(version) + ", newest supported is " +
                           std::to_string(kModelFormatVersion));
    }
    try {
        if (canonical_dump(doc) != bytes) {
            throw IntegrityError("model " + model_id + " is not in canonical form");
        }
        json unsealed = doc;
        const auto integrity = unsealed.at("integrity").get<std::string>();
        unsealed.erase("integrity");
        if (sha256_hex(canonical_dump(unsealed)) != integrity) {
            throw IntegrityError("model " + model_id + " failed its integrity check");
        }
        unsealed.erase("created_at");
        const auto stored_id = unsealed.at("model_id").get<std::string>();
        unsealed.erase("model_id");
        if (stored_id != model_id || sha256_hex(canonical_dump(unsealed)) != model_id) {
            throw IntegrityError("model " + model_id + " content does not match its id");
        }
    } catch (const json::exception &e) {
        throw IntegrityError("model " + model_id + " is malformed: " + e.what());
    } catch (const ValidationError &e) {
        throw IntegrityError("model " + model_id + " is malformed: " + e.what());
    }
    return doc;
}

TrainedModel ModelStore::load(const std::string &model_id) const {
    const auto doc = read_verified(model_id);
    try {
        return model_from_document(doc);
    } catch (const json::exception &e) {
        throw IntegrityError("model " + model_id + " is malformed: " + e.what());
    }
}

ModelEnvelope ModelStore::envelope(const std::string &model_id) const {
    const auto doc = read_verified(model_id);
    ModelEnvelope e;
    e.format_version = doc.at("format_version").get<int>();
    e.model_id = doc.at("model_id").get<std::string>();
    e.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    e.schema_fingerprint = doc.at("schema_fingerprint").get<std::string>();
    e.hyperparameters = doc.at("hyperparameters");
    e.created_at = doc.at("created_at").get<std::string>();
    e.features = doc.at("features").get<std::vector<std::string>>();
    return e;
}

std::vector<ModelEnvelope> ModelStore::list() const {
    std::vector<ModelEnvelope> out;
    if (!std::filesystem::is_directory(root_)) {
        return out;
    }
    for (const auto &entry : std::filesystem::directory_iterator(root_)) {
        const auto name = entry.path().filename().string();
        if (name.size() != 64 + 5 || name.substr(64) != ".json") {
            continue;
        }
        const auto id = name.substr(0, 64);
        if (is_model_id(id)) {
            out.push_back(envelope(id));
        }
    }
    std::sort(out.begin(), out.end(), [](const ModelEnvelope &a, const ModelEnvelope &b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.model_id < b.model_id;
    });
    return out;
}

void ModelStore::save_metrics(const std::string &model_id, const EvaluationReport &r) {
    if (!std::filesystem::exists(model_path(model_id))) {
        throw NotFoundError("unknown model '" + model_id + "'");
    }
    write_file_atomic(root_ / (model_id + ".metrics.json"), canonical_dump(to_json(r)));
}

std::optional<EvaluationReport> ModelStore::load_metrics(const std::string &model_id) const {
    if (!is_model_id(model_id)) {
        return std::nullopt;
    }
    const auto path = root_ / (model_id + ".metrics.json");
    if (!std::filesystem::exists(path)) {
        return std::nullopt;
    }
    try {
        return evaluation_from_json(json::parse(read_file(path)));
    } catch (const json::exception &e) {
        throw IntegrityError("metrics for " + model_id + " are malformed: " + e.what());
    }
}

void ModelStore::rebuild_index() const {
    json models = json::array();
    for (const auto &e : list()) {
        models.push_back(e.to_json());
    }
    write_file_atomic(root_ / "index.json", canonical_dump({{"format_version", kModelFormatVersion}, {"models", models}}));
}

}  // namespace neurosvm
