#pragma once

#include "neurosvm/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neurosvm {

enum class AttributeKind { numeric, nominal };

struct Attribute {
    std::string name;
    AttributeKind kind;
};

/// Positions of the ten ILPD biomarkers, in file column order.
enum class Attr : std::size_t { age = 0, gender, tb, db, alkphos, sgpt, sgot, tp, alb, ag_ratio };

inline constexpr std::size_t kAttributeCount = 10;

constexpr std::size_t index(Attr a) noexcept { return static_cast<std::size_t>(a); }

/// Column layout of an ILPD file: ten attributes followed by the class column.
struct Schema {
    std::vector<Attribute> attributes;
    std::string class_attribute;

    static const Schema &ilpd();

    /// Index of the attribute called `name`, or nullopt.
    [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const;
    /// Same as find(), throwing ValidationError for unknown names.
    [[nodiscard]] std::size_t index_of(std::string_view name) const;
    /// Stable textual digest of names and kinds, stored in saved models.
    [[nodiscard]] std::string fingerprint() const;

    friend bool operator==(const Schema &, const Schema &) = default;
};

inline bool operator==(const Attribute &a, const Attribute &b) { return a.name == b.name && a.kind == b.kind; }

/// Class 1 is a liver patient, class 2 is not.
enum class Label : int { patient = 1, non_patient = 2 };

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }

struct Record {
    /// Gender is encoded Female = 0, Male = 1. Empty optional = missing.
    std::array<std::optional<double>, kAttributeCount> values{};
    std::optional<Label> label;

    [[nodiscard]] bool complete() const noexcept;

    friend bool operator==(const Record &, const Record &) = default;
};

struct Dataset {
    Schema schema = Schema::ilpd();
    std::vector<Record> records;
    std::string provenance;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] std::size_t count(Label l) const noexcept;
};

enum class MissingPolicy { drop_record, null_out };

struct SplitResult {
    Dataset train;
    Dataset test;
    /// Positions in the input dataset of every train / test record.
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    double fraction = 0.0;
};

inline constexpr double kDefaultSplitFraction = 2.0 / 3.0;

/// Parse comma-separated ILPD text. A first line whose Age field is not numeric
/// is treated as a header. Empty fields become missing values.
Dataset parse_ilpd(std::istream &source, const Schema &schema = Schema::ilpd(), std::string provenance = {});
Dataset load_ilpd(const std::string &path);

/// Inverse of parse_ilpd (no header, shortest round-trip numbers).
void write_ilpd(const Dataset &d, std::ostream &out);

/// Validates the Record range invariants, throwing ValidationError naming the field.
void validate_record(const Record &r, const Schema &schema = Schema::ilpd());

Dataset handle_missing(const Dataset &d, MissingPolicy policy = MissingPolicy::drop_record);

/// Uniform seeded permutation (xoshiro256** + Fisher-Yates over record positions).
Dataset shuffle(const Dataset &d, std::uint64_t seed);
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Shuffle, then the first ceil(fraction * n) records form the training set.
SplitResult split(const Dataset &d, double fraction, std::uint64_t seed);

/// k disjoint index folds covering [0, n) with sizes differing by at most one.
std::vector<std::vector<std::size_t>> kfold_plan(std::size_t n, std::size_t k, std::uint64_t seed);

Dataset subset(const Dataset &d, std::span<const std::size_t> positions);

/// Dense row-major design matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

    [[nodiscard]] std::vector<double> column(std::size_t c) const;

    friend bool operator==(const Matrix &, const Matrix &) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Design matrix over `columns` (schema indices). Throws ValidationError on missing values.
Matrix to_matrix(const Dataset &d, std::span<const std::size_t> columns);
std::vector<Label> labels_of(const Dataset &d);

/// Feature vector of one record over `columns`; throws ValidationError naming a missing field.
std::vector<double> feature_vector(const Record &r, std::span<const std::size_t> columns, const Schema &schema = Schema::ilpd());

std::vector<std::size_t> all_attribute_indices();
std::vector<std::size_t> indices_of(const Schema &schema, std::span<const std::string> names);
std::vector<std::string> names_of(const Schema &schema, std::span<const std::size_t> columns);

}  // namespace neurosvm
