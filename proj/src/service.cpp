#include "neurosvm/service.hpp"

#include "neurosvm/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>

namespace neurosvm {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

HttpResponse error_response(int status, std::vector<FieldError> errors) { return {status, errors_json(errors)}; }

HttpResponse single_error(int status, std::string field, std::string code, std::string message) {
    return error_response(status, {{std::move(field), std::move(code), std::move(message)}});
}

}  // namespace

json errors_json(const std::vector<FieldError> &errors) {
    json list = json::array();
    for (const auto &e : errors) {
        list.push_back({{"field", e.field.empty() ? json(nullptr) : json(e.field)}, {"code", e.code}, {"message", e.message}});
    }
    return {{"errors", list}};
}

std::variant<Record, std::vector<FieldError>> parse_attributes(const json &attributes) {
    const auto &schema = Schema::ilpd();
    std::vector<FieldError> errors;
    if (!attributes.is_object()) {
        errors.push_back({"attributes", "invalid_type", "attributes must be an object"});
        return errors;
    }
    for (const auto &[key, _] : attributes.items()) {
        if (!schema.find(key)) {
            errors.push_back({"attributes." + key, "unknown_field", "'" + key + "' is not an ILPD attribute"});
        }
    }
    Record r;
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        const auto &name = schema.attributes[i].name;
        const std::string field = "attributes." + name;
        auto it = attributes.find(name);
        if (it == attributes.end() || it->is_null()) {
            errors.push_back({field, "missing_field", name + " is required"});
            continue;
        }
        if (i == index(Attr::gender)) {
            if (!it->is_string()) {
                errors.push_back({field, "invalid_type", "Gender must be the string \"Male\" or \"Female\""});
                continue;
            }
            const auto g = lower(it->get<std::string>());
            if (g == "male") {
                r.values[i] = 1.0;
            } else if (g == "female") {
                r.values[i] = 0.0;
            } else {
                errors.push_back({field, "invalid_value", "Gender must be \"Male\" or \"Female\""});
            }
            continue;
        }
        if (!it->is_number()) {
            errors.push_back({field, "invalid_type", name + " must be a number"});
            continue;
        }
        const double v = it->get<double>();
        if (!std::isfinite(v)) {
            errors.push_back({field, "invalid_value", name + " must be finite"});
        } else if (v < 0.0) {
            errors.push_back({field, "out_of_range", name + " must be >= 0"});
        } else {
            r.values[i] = v;
        }
    }
    if (!errors.empty()) {
        return errors;
    }
    return r;
}

std::string_view label_text(Label l) noexcept { return l == Label::patient ? "liver patient" : "non-patient"; }

json prediction_json(const Prediction &p, const std::string &model_id, Algorithm a) {
    return {{"label", to_int(p.label)},
            {"label_text", std::string(label_text(p.label))},
            {"score", p.score},
            {"model_id", model_id},
            {"algorithm", std::string(to_string(a))}};
}

PredictionService::PredictionService(const ModelStore &store) : order_(store.list()) {
    for (const auto &e : order_) {
        entries_.emplace(e.model_id, Entry{e, store.load(e.model_id), store.load_metrics(e.model_id)});
    }
}

HttpResponse PredictionService::health() const { return {200, {{"status", "ok"}}}; }

HttpResponse PredictionService::models() const {
    json list = json::array();
    for (const auto &e : order_) {
        list.push_back(e.to_json());
    }
    return {200, {{"models", list}}};
}

HttpResponse PredictionService::predict(const std::string &body) const {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::parse_error &e) {
        return single_error(400, "", "malformed_json", std::string("request body is not valid JSON: ") + e.what());
    }
    if (!req.is_object()) {
        return single_error(400, "", "invalid_type", "request body must be a JSON object");
    }
    std::vector<FieldError> errors;
    for (const auto &[key, _] : req.items()) {
        if (key != "model_id" && key != "attributes") {
            errors.push_back({key, "unknown_field", "'" + key + "' is not a request field"});
        }
    }
    const Entry *entry = nullptr;
    auto id = req.find("model_id");
    if (id == req.end() || id->is_null()) {
        errors.push_back({"model_id", "missing_field", "model_id is required"});
    } else if (!id->is_string()) {
        errors.push_back({"model_id", "invalid_type", "model_id must be a string"});
    } else if (auto it = entries_.find(id->get<std::string>()); it != entries_.end()) {
        entry = &it->second;
    }
    auto attrs = req.find("attributes");
    std::optional<Record> record;
    if (attrs == req.end() || attrs->is_null()) {
        errors.push_back({"attributes", "missing_field", "attributes is required"});
    } else {
        auto parsed = parse_attributes(*attrs);
        if (auto *errs = std::get_if<std::vector<FieldError>>(&parsed)) {
            errors.insert(errors.end(), errs->begin(), errs->end());
        } else {
            record = std::get<Record>(parsed);
        }
    }
    if (!errors.empty()) {
        return error_response(400, std::move(errors));
    }
    if (!entry) {
        return single_error(404, "model_id", "unknown_model", "no model '" + id->get<std::string>() + "' in the store");
    }
    const auto p = neurosvm::predict(entry->model, *record);
    return {200, prediction_json(p, entry->envelope.model_id, entry->envelope.algorithm)};
}

HttpResponse PredictionService::metrics(const std::string &model_id) const {
    auto it = entries_.find(model_id);
    if (it == entries_.end()) {
        return single_error(404, "model_id", "unknown_model", "no model '" + model_id + "' in the store");
    }
    if (!it->second.metrics) {
        return single_error(404, "model_id", "not_evaluated", "model '" + model_id + "' has no stored metrics");
    }
    return {200, to_json(*it->second.metrics)};
}

HttpResponse PredictionService::handle(const std::string &method, const std::string &path,
                                       const std::string &body) const {
    try {
        if (path == "/health") {
            return method == "GET" ? health() : single_error(405, "", "method_not_allowed", "use GET");
        }
        if (path == "/models") {
            return method == "GET" ? models() : single_error(405, "", "method_not_allowed", "use GET");
        }
        if (path == "/predict") {
            return method == "POST" ? predict(body) : single_error(405, "", "method_not_allowed", "use POST");
        }
        constexpr std::string_view prefix = "/models/", suffix = "/metrics";
        if (path.size() > prefix.size() + suffix.size() && path.starts_with(prefix) && path.ends_with(suffix)) {
            if (method != "GET") {
                return single_error(405, "", "method_not_allowed", "use GET");
            }
            return metrics(path.substr(prefix.size(), path.size() - prefix.size() - suffix.size()));
        }
        return single_error(404, "", "not_found", "no route " + method + " " + path);
    } catch (const std::exception &e) {
        std::cerr << "internal error on " << method << ' ' << path << ": " << e.what() << '\n';
        return single_error(500, "", "internal", "internal error");
    }
}

void install_routes(httplib::Server &server, const PredictionService &service) {
    auto bind = [&service](const httplib::Request &req, httplib::Response &res) {
        const auto r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get(R"(/.*)", bind);
    server.Post(R"(/.*)", bind);
    server.Put(R"(/.*)", bind);
    server.Delete(R"(/.*)", bind);
}

bool serve(const PredictionService &service, const std::string &host, int port) {
    httplib::Server server;
    install_routes(server, service);
    return server.listen(host, port);
}

}  // namespace neurosvm
