#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "rde/network.hpp"
#include "rde/reference.hpp"

namespace rde {

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Mean and standard error of `values`, both accumulated with compensated
/// summation in index order. Needs at least two values.
McEstimate mean_and_standard_error(std::span<const double> values);

/// Monte-Carlo estimate of E[½(Φ(x) - Φ(y))²] with y drawn by
/// sample_obfuscation. Sample j uses noise stream j, and the reduction runs
/// in sample order, so results do not depend on `threads`.
McEstimate mc_distortion(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const RelevanceScores& s, std::size_t count, std::uint64_t seed,
                         std::size_t threads = 1);

}  // namespace rde
