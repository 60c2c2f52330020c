#pragma once

#include "neurosvm/dataset.hpp"

#include <span>
#include <string>
#include <vector>

namespace neurosvm {

/// Per-feature z-score parameters; stddev uses the sample (n - 1) divisor.
struct ScalingParams {
    std::vector<double> mean;
    std::vector<double> stddev;

    [[nodiscard]] std::size_t size() const noexcept { return mean.size(); }
    [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;
    [[nodiscard]] Matrix apply(const Matrix &x) const;

    friend bool operator==(const ScalingParams &, const ScalingParams &) = default;
};

/// Throws ValidationError naming the first zero-variance column (or one with fewer than two rows).
ScalingParams standardize_fit(const Matrix &x, std::span<const std::string> names = {});
ScalingParams standardize_fit(const Dataset &d, std::span<const std::size_t> columns);

}  // namespace neurosvm
