#pragma once

#include "neurosvm/evaluation.hpp"
#include "neurosvm/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neurosvm {

inline constexpr int kModelFormatVersion = 1;

/// Canonical text form: keys sorted bytewise, no whitespace, numbers in shortest
/// round-trip form (integers without a fraction, reals always with '.' or an exponent).
/// Throws ValidationError when the document holds a non-finite number.
std::string canonical_dump(const nlohmann::json &j);

std::string sha256_hex(std::string_view bytes);

nlohmann::json model_hyperparameters(const TrainedModel &m);
nlohmann::json model_parameters(const TrainedModel &m);
/// Scaling stats of SVM-based models, null otherwise.
nlohmann::json model_scaling(const TrainedModel &m);

/// Hash input: every envelope field except model_id, created_at and integrity.
nlohmann::json model_payload(const TrainedModel &m);
std::string compute_model_id(const TrainedModel &m);

struct ModelEnvelope {
    int format_version = kModelFormatVersion;
    std::string model_id;
    Algorithm algorithm = Algorithm::svm;
    std::string schema_fingerprint;
    nlohmann::json hyperparameters;
    std::string created_at;
    std::vector<std::string> features;

    /// Summary used by listings (no parameters).
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Full stored document for `m`.
nlohmann::json model_document(const TrainedModel &m, const std::string &created_at);
/// Rebuilds the model from a verified document.
TrainedModel model_from_document(const nlohmann::json &doc);

std::string utc_timestamp_now();

/// Directory of content-addressed model files: <store>/<model_id>.json, an optional
/// <store>/<model_id>.metrics.json, and <store>/index.json (a cache, never read back).
class ModelStore {
  public:
    explicit ModelStore(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path &root() const noexcept { return root_; }

    /// Writes atomically (temp file + rename) and returns the model id. Saving an
    /// existing id keeps the stored file, so created_at stays that of the first save.
    std::string save(const TrainedModel &m, std::optional<std::string> created_at = std::nullopt);
    /// Throws NotFoundError, VersionError or IntegrityError.
    [[nodiscard]] TrainedModel load(const std::string &model_id) const;
    [[nodiscard]] ModelEnvelope envelope(const std::string &model_id) const;
    /// Sorted by created_at, then model_id.
    [[nodiscard]] std::vector<ModelEnvelope> list() const;

    void save_metrics(const std::string &model_id, const EvaluationReport &r);
    [[nodiscard]] std::optional<EvaluationReport> load_metrics(const std::string &model_id) const;

    void rebuild_index() const;

  private:
    [[nodiscard]] std::filesystem::path model_path(const std::string &model_id) const;
    [[nodiscard]] nlohmann::json read_verified(const std::string &model_id) const;

    std::filesystem::path root_;
};

void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

}  // namespace neurosvm
