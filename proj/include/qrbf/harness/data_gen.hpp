#pragma once

#include <cstdint>

#include "qrbf/dataset.hpp"
#include "qrbf/harness/config.hpp"

namespace qrbf::harness {

/// Built-in target function evaluated at a point of the box [lo, hi]^d.
[[nodiscard]] double target_value(Target target, const Eigen::VectorXd& x, double lo, double hi);

/// m distinct sites uniform in [lo, hi]^d with values from the target.
/// Throws InvalidArgument when the box cannot hold m distinct points.
[[nodiscard]] DataSet gen_data(Eigen::Index m, Eigen::Index d, double lo, double hi, std::uint64_t seed,
                               Target target);
[[nodiscard]] DataSet gen_data(const DataSpec& spec, std::uint64_t seed);

/// n query points uniform in the box (an independent stream from the sites).
[[nodiscard]] Eigen::MatrixXd gen_points(Eigen::Index n, Eigen::Index d, double lo, double hi, std::uint64_t seed);

/// Dataset from spec.file when set, generated otherwise.
[[nodiscard]] DataSet load_or_generate(const DataSpec& spec, std::uint64_t seed);

}  // namespace qrbf::harness
