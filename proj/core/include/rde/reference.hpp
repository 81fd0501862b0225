#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "rde/types.hpp"

namespace rde {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DiagonalCovariance {
  Vector variances;
};

/// Covariance Q Qᵀ represented by its d×r factor Q.
struct LowRankCovariance {
  Matrix factor;
};

/// Gaussian model of the reference distribution used to fill in
/// non-relevant components.
class GaussianReference {
 public:
  using Covariance = std::variant<DiagonalCovariance, LowRankCovariance>;

  /// Throws DimensionError on length mismatch, negative variances, r > d or
  /// non-finite entries.
  GaussianReference(Vector mean, Covariance covariance);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Covariance& covariance() const { return covariance_; }
  CovarianceMode native_mode() const;

  /// Diagonal of the covariance (row norms squared in low-rank form).
  Vector variances() const;
  /// A factor Q with covariance Q Qᵀ; diag(√var) in diagonal form.
  Matrix factor() const;

 private:
  Vector mean_;
  Covariance covariance_;
};

struct EstimateOptions {
  CovarianceMode mode = CovarianceMode::kDiagonal;
  std::size_t rank = 30;
};

struct ReferenceEstimate {
  GaussianReference reference;
  std::size_t requested_rank = 0;
  std::size_t rank = 0;
  /// Set when the requested rank exceeded min(d, N-1) and was reduced.
  bool rank_reduced = false;
};

/// Estimates mean and covariance from `data` (one sample per row). Variances
/// use the unbiased N-1 divisor and a one-pass Welford update; the low-rank
/// factor is V_r Σ_r / √(N-1) from a thin SVD of the centered data.
ReferenceEstimate estimate_reference(const Matrix& data, const EstimateOptions& options = {});

/// Relevance scores s ∈ [0,1]^d.
class RelevanceScores {
 public:
  explicit RelevanceScores(Vector values);
  static RelevanceScores constant(std::size_t dim, double value);

  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
  const Vector& values() const { return values_; }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

 private:
  Vector values_;
};

/// Mean and covariance representation of a layer's activations.
struct MomentState {
  CovarianceMode mode = CovarianceMode::kDiagonal;
  Vector mean;
  Vector variance;  // diagonal mode
  Matrix factor;    // low-rank mode, n×r

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  /// Per-component standard deviation.
  Vector stddev() const;
};

/// First and second moments of y = x⊙s + n⊙(1-s). `mode` selects the
/// covariance representation; a diagonal reference in low-rank mode uses the
/// factor diag(√var), a low-rank reference in diagonal mode uses diag(QQᵀ).
MomentState input_moments(const GaussianReference& ref, const Vector& x, const RelevanceScores& s,
                          CovarianceMode mode);
MomentState input_moments(const GaussianReference& ref, const Vector& x, const RelevanceScores& s);

/// Sample number `index` of the reference noise n under `seed`.
Vector draw_reference_noise(const GaussianReference& ref, std::uint64_t seed, std::uint64_t index);

/// `count` rows of y = x⊙s + n⊙(1-s). Row j uses noise stream j, so the
/// result is reproducible and independent of evaluation order.
Matrix sample_obfuscation(const GaussianReference& ref, const Vector& x, const RelevanceScores& s,
                          std::size_t count, std::uint64_t seed);

/// One obfuscated sample built from a given noise vector.
Vector obfuscate(const Vector& x, const RelevanceScores& s, const Vector& noise);

}  // namespace rde
