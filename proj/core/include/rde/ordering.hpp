#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rde/network.hpp"
#include "rde/reference.hpp"

namespace rde {

struct CurvePoint {
  double rate = 0.0;  // fraction of components fixed to x
  double distortion = 0.0;
  double standard_error = 0.0;
};

struct RateDistortionCurve {
  std::vector<CurvePoint> points;
  std::size_t samples_per_point = 0;
  std::size_t images_averaged = 0;
};

struct OrderingOptions {
  std::vector<double> rates;  // strictly increasing, within [0,1]
  std::size_t samples = 512;
  std::uint64_t seed = 0;
  /// Clamp obfuscated inputs to [0,1]^d before evaluation. Off by default.
  bool clamp = false;
};

/// `count` evenly spaced rates from 0 to 1 inclusive.
std::vector<double> uniform_rates(std::size_t count = 64);

/// 512 random samples per point up to 1024 components, 64 above.
std::size_t default_samples(std::size_t input_dim);

/// Component indices sorted by descending score; ties are broken uniformly
/// at random under `seed`.
std::vector<std::size_t> ordering_from_scores(std::span<const double> scores, std::uint64_t seed);

/// Number of components fixed at rate ρ: ⌈ρ·d⌉, with a 1e-9 slack so that
/// rates such as 3/20 are not pushed up by representation error.
std::size_t components_at_rate(double rate, std::size_t dim);

/// Relevance-ordering test for one input: for each rate, the first
/// ⌈ρd⌉ components of `ordering` are taken from x and the rest from reference
/// noise. The same noise draws are used at every rate.
RateDistortionCurve evaluate_ordering(const NeuralNetwork& net, const GaussianReference& ref,
                                      const Vector& x, std::span<const std::size_t> ordering,
                                      const OrderingOptions& options);

/// Pointwise mean of the per-image curves. Orderings come from
/// ordering_from_scores(maps[i], seed); every image sees the same noise
/// draws, and the standard error is that of the per-sample image average.
RateDistortionCurve evaluate_batch(const NeuralNetwork& net, const GaussianReference& ref,
                                   const std::vector<Vector>& images,
                                   const std::vector<Vector>& maps, const OrderingOptions& options,
                                   std::size_t threads = 1);

/// Trapezoidal area under the distortion curve over its rate range.
double trapezoid_auc(const RateDistortionCurve& curve);

}  // namespace rde
