#include "neurosvm/learners/scaling.hpp"

#include "neurosvm/error.hpp"

#include <cmath>

namespace neurosvm {

ScalingParams standardize_fit(const Matrix &x, std::span<const std::string> names) {
    const auto label = [&](std::size_t c) {
        return c < names.size() ? names[c] : "column " + std::to_string(c);
    };
    ScalingParams p;
    p.mean.resize(x.cols());
    p.stddev.resize(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (x.rows() < 2) {
            throw ValidationError("cannot standardize " + label(c) + ": fewer than two rows");
        }
        double sum = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            sum += x(r, c);
        }
        const double mean = sum / static_cast<double>(x.rows());
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double d = x(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
        if (!(sd > 0.0)) {
            throw ValidationError("cannot standardize " + label(c) + ": zero variance");
        }
        p.mean[c] = mean;
        p.stddev[c] = sd;
    }
    return p;
}

ScalingParams standardize_fit(const Dataset &d, std::span<const std::size_t> columns) {
    const auto names = names_of(d.schema, columns);
    return standardize_fit(to_matrix(d, columns), names);
}

std::vector<double> ScalingParams::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) {
        throw ValidationError("scaling expects " + std::to_string(mean.size()) + " features, got " +
                              std::to_string(row.size()));
    }
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        out[i] = (row[i] - mean[i]) / stddev[i];
    }
    return out;
}

Matrix ScalingParams::apply(const Matrix &x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto z = apply(x.row(r));
        std::copy(z.begin(), z.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace neurosvm
