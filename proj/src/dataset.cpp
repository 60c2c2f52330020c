#include "neurosvm/dataset.hpp"

#include "neurosvm/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace neurosvm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

const Schema &Schema::ilpd() {
    static const Schema schema{
        {{"Age", AttributeKind::numeric},
         {"Gender", AttributeKind::nominal},
         {"TB", AttributeKind::numeric},
         {"DB", AttributeKind::numeric},
         {"Alkphos", AttributeKind::numeric},
         {"Sgpt", AttributeKind::numeric},
         {"Sgot", AttributeKind::numeric},
         {"TP", AttributeKind::numeric},
         {"ALB", AttributeKind::numeric},
         {"A/G Ratio", AttributeKind::numeric}},
        "Class"};
    return schema;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
    if (auto i = find(name)) {
        return *i;
    }
    throw ValidationError("unknown attribute '" + std::string(name) + "'");
}

std::string Schema::fingerprint() const {
    std::string out;
    for (const auto &a : attributes) {
        out += a.name;
        out += a.kind == AttributeKind::numeric ? ":numeric;" : ":nominal;";
    }
    out += class_attribute + ":class{1,2}";
    return out;
}

bool Record::complete() const noexcept {
    return std::all_of(values.begin(), values.end(), [](const auto &v) { return v.has_value(); });
}

std::size_t Dataset::count(Label l) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const Record &r) { return r.label == l; }));
}

void validate_record(const Record &r, const Schema &schema) {
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        const auto &v = r.values[i];
        if (!v) {
            continue;
        }
        if (!std::isfinite(*v)) {
            throw ValidationError(schema.attributes[i].name + " must be finite");
        }
        if (i == index(Attr::gender)) {
            if (*v != 0.0 && *v != 1.0) {
                throw ValidationError("Gender must be encoded 0 (Female) or 1 (Male)");
            }
        } else if (*v < 0.0) {
            throw ValidationError(schema.attributes[i].name + " must be >= 0");
        }
    }
}

Dataset parse_ilpd(std::istream &source, const Schema &schema, std::string provenance) {
    if (schema.attributes.size() != kAttributeCount) {
        throw ValidationError("schema must list exactly " + std::to_string(kAttributeCount) + " attributes");
    }
    Dataset d;
    d.schema = schema;
    d.provenance = std::move(provenance);

    const std::size_t expected_columns = kAttributeCount + 1;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (first_content_line) {
            first_content_line = false;
            if (!fields.empty() && !fields[0].empty() && !parse_number(fields[0])) {
                continue;  // header
            }
        }
        if (fields.size() != expected_columns) {
            throw ParseError(line_no, "expected " + std::to_string(expected_columns) + " columns, found " +
                                          std::to_string(fields.size()));
        }

        Record rec;
        for (std::size_t i = 0; i < kAttributeCount; ++i) {
            const auto field = fields[i];
            if (field.empty()) {
                continue;
            }
            if (schema.attributes[i].kind == AttributeKind::nominal) {
                if (iequals(field, "male")) {
                    rec.values[i] = 1.0;
                } else if (iequals(field, "female")) {
                    rec.values[i] = 0.0;
                } else {
                    throw ParseError(line_no, schema.attributes[i].name + ": expected Male or Female, got '" +
                                                  std::string(field) + "'");
                }
                continue;
            }
            const auto value = parse_number(field);
            if (!value) {
                throw ParseError(line_no, schema.attributes[i].name + ": malformed number '" + std::string(field) + "'");
            }
            rec.values[i] = *value;
        }

        const auto class_field = fields[kAttributeCount];
        const auto cls = parse_number(class_field);
        if (!cls || (*cls != 1.0 && *cls != 2.0)) {
            throw ParseError(line_no, schema.class_attribute + " must be 1 or 2, got '" + std::string(class_field) + "'");
        }
        rec.label = *cls == 1.0 ? Label::patient : Label::non_patient;

        try {
            validate_record(rec, schema);
        } catch (const ValidationError &e) {
            throw ParseError(line_no, e.what());
        }
        d.records.push_back(rec);
    }
    return d;
}

Dataset load_ilpd(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot open dataset '" + path + "'");
    }
    return parse_ilpd(in, Schema::ilpd(), path);
}

void write_ilpd(const Dataset &d, std::ostream &out) {
    for (const auto &r : d.records) {
        for (std::size_t i = 0; i < kAttributeCount; ++i) {
            const auto &v = r.values[i];
            if (v) {
                if (d.schema.attributes[i].kind == AttributeKind::nominal) {
                    out << (*v == 1.0 ? "Male" : "Female");
                } else {
                    out << format_number(*v);
                }
            }
            out << ',';
        }
        if (r.label) {
            out << to_int(*r.label);
        }
        out << '\n';
    }
}

Dataset handle_missing(const Dataset &d, MissingPolicy policy) {
    if (policy == MissingPolicy::null_out) {
        return d;
    }
    Dataset out;
    out.schema = d.schema;
    out.provenance = d.provenance;
    std::copy_if(d.records.begin(), d.records.end(), std::back_inserter(out.records),
                 [](const Record &r) { return r.complete(); });
    return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        idx[i] = i;
    }
    Rng rng(seed);
    fisher_yates(std::span<std::size_t>(idx), rng);
    return idx;
}

Dataset subset(const Dataset &d, std::span<const std::size_t> positions) {
    Dataset out;
    out.schema = d.schema;
    out.provenance = d.provenance;
    out.records.reserve(positions.size());
    for (auto p : positions) {
        out.records.push_back(d.records.at(p));
    }
    return out;
}

Dataset shuffle(const Dataset &d, std::uint64_t seed) {
    const auto order = shuffled_indices(d.size(), seed);
    return subset(d, order);
}

SplitResult split(const Dataset &d, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ValidationError("split fraction must lie in (0, 1)");
    }
    const auto order = shuffled_indices(d.size(), seed);
    const auto n_train = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d.size())));

    SplitResult r;
    r.seed = seed;
    r.fraction = fraction;
    r.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    r.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    r.train = subset(d, r.train_indices);
    r.test = subset(d, r.test_indices);
    return r;
}

std::vector<std::vector<std::size_t>> kfold_plan(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw ValidationError("fold count must satisfy 2 <= k <= n (k=" + std::to_string(k) + ", n=" +
                              std::to_string(n) + ")");
    }
    const auto order = shuffled_indices(n, seed);
    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                        order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(folds[f].begin(), folds[f].end());
        pos += size;
    }
    return folds;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

std::vector<double> feature_vector(const Record &r, std::span<const std::size_t> columns, const Schema &schema) {
    std::vector<double> out;
    out.reserve(columns.size());
    for (auto c : columns) {
        const auto &v = r.values.at(c);
        if (!v) {
            throw ValidationError("missing value for feature '" + schema.attributes.at(c).name + "'");
        }
        out.push_back(*v);
    }
    return out;
}

Matrix to_matrix(const Dataset &d, std::span<const std::size_t> columns) {
    Matrix m(d.size(), columns.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto row = feature_vector(d.records[i], columns, d.schema);
        std::copy(row.begin(), row.end(), m.row(i).begin());
    }
    return m;
}

std::vector<Label> labels_of(const Dataset &d) {
    std::vector<Label> out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d.records[i].label) {
            throw ValidationError("record " + std::to_string(i) + " has no class label");
        }
        out.push_back(*d.records[i].label);
    }
    return out;
}

std::vector<std::size_t> all_attribute_indices() {
    std::vector<std::size_t> out(kAttributeCount);
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
        out[i] = i;
    }
    return out;
}

std::vector<std::size_t> indices_of(const Schema &schema, std::span<const std::string> names) {
    std::vector<std::size_t> out;
    out.reserve(names.size());
    for (const auto &n : names) {
        out.push_back(schema.index_of(n));
    }
    return out;
}

std::vector<std::string> names_of(const Schema &schema, std::span<const std::size_t> columns) {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (auto c : columns) {
        out.push_back(schema.attributes.at(c).name);
    }
    return out;
}

}  // namespace neurosvm
