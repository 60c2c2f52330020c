#pragma once

#include "neurosvm/persistence.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace httplib {
class Server;
}

namespace neurosvm {

struct FieldError {
    std::string field;
    std::string code;  ///< missing_field, invalid_type, invalid_value, out_of_range, unknown_field
    std::string message;
};

nlohmann::json errors_json(const std::vector<FieldError> &errors);

/// Parses the "attributes" object of a predict request. All ten attributes
/// are required; Gender is "Male" or "Female" (any case).
std::variant<Record, std::vector<FieldError>> parse_attributes(const nlohmann::json &attributes);

std::string_view label_text(Label l) noexcept;

nlohmann::json prediction_json(const Prediction &p, const std::string &model_id, Algorithm a);

struct HttpResponse {
    int status = 200;
    nlohmann::json body;
};

/// Read-only view over a model store, loaded once at construction.
class PredictionService {
  public:
    explicit PredictionService(const ModelStore &store);

    [[nodiscard]] HttpResponse handle(const std::string &method, const std::string &path,
                                      const std::string &body) const;

    [[nodiscard]] HttpResponse health() const;
    [[nodiscard]] HttpResponse models() const;
    [[nodiscard]] HttpResponse predict(const std::string &body) const;
    [[nodiscard]] HttpResponse metrics(const std::string &model_id) const;

    [[nodiscard]] std::size_t model_count() const noexcept { return entries_.size(); }

  private:
    struct Entry {
        ModelEnvelope envelope;
        TrainedModel model;
        std::optional<EvaluationReport> metrics;
    };
    std::vector<ModelEnvelope> order_;
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Routes every request on `server` through `service.handle`.
void install_routes(httplib::Server &server, const PredictionService &service);

/// Blocks serving `service` until the process is stopped.
/// Returns false when the address cannot be bound.
bool serve(const PredictionService &service, const std::string &host, int port);

}  // namespace neurosvm
