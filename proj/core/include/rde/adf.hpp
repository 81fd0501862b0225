#pragma once

#include "rde/network.hpp"
#include "rde/reference.hpp"

namespace rde {

/// Standard normal density.
double std_normal_pdf(double t);
/// Standard normal distribution function via erfc; values below 1e-300 are
/// returned as 0.
double std_normal_cdf(double t);

/// Standard deviations below this are treated as deterministic in the ReLU
/// rule.
inline constexpr double kDeterministicStddev = 1e-12;

/// Gaussian image of an affine map: mean ← Wμ + b, diagonal σ ← (W⊙W)σ,
/// factor ← W·factor.
MomentState propagate_affine(const MomentState& state, const AffineLayer& layer);

/// Moment-matched ReLU. Mean and diagonal variance are the exact marginal
/// moments of ϱ(z) for z ~ N(μ, σ²); in factor mode each factor row is
/// scaled by F(μ/σ). Components with σ < kDeterministicStddev pass through
/// the deterministic limit.
MomentState propagate_relu(const MomentState& state);

/// Expected distortion split into its bias and variance parts.
struct DistortionReport {
  double bias_term = 0.0;
  double variance_term = 0.0;
  double total = 0.0;
  double output_mean = 0.0;
  double output_variance = 0.0;
  double reference_output = 0.0;  // Φ(x)
};

/// Output moments of `net` under the obfuscation distribution at scores `s`.
MomentState propagate_network(const NeuralNetwork& net, MomentState state);

DistortionReport adf_distortion(const NeuralNetwork& net, const GaussianReference& ref,
                                const Vector& x, const RelevanceScores& s, CovarianceMode mode);

struct DistortionGradient {
  DistortionReport report;
  Vector gradient;  // ∂D/∂s
};

/// ADF distortion together with its exact reverse-mode derivative with
/// respect to the relevance scores.
DistortionGradient adf_distortion_gradient(const NeuralNetwork& net, const GaussianReference& ref,
                                           const Vector& x, const RelevanceScores& s,
                                           CovarianceMode mode);

}  // namespace rde
