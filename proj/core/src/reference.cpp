#include "rde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "rde/random.hpp"

namespace rde {

namespace {

std::string dims(Eigen::Index a, Eigen::Index b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace

GaussianReference::GaussianReference(Vector mean, Covariance covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() == 0) throw DimensionError("reference mean is empty");
  if (!mean_.allFinite()) throw DimensionError("reference mean has non-finite entries");
  if (const auto* diag = std::get_if<DiagonalCovariance>(&covariance_)) {
    if (diag->variances.size() != mean_.size()) {
      throw DimensionError("variance length mismatch: " + dims(diag->variances.size(), mean_.size()));
    }
    if (!diag->variances.allFinite() || (diag->variances.array() < 0.0).any()) {
      throw DimensionError("variances must be finite and non-negative");
    }
  } else {
    const auto& low = std::get<LowRankCovariance>(covariance_);
    if (low.factor.rows() != mean_.size()) {
      throw DimensionError("factor row count mismatch: " + dims(low.factor.rows(), mean_.size()));
    }
    if (low.factor.cols() > low.factor.rows()) throw DimensionError("factor rank exceeds dimension");
    if (!low.factor.allFinite()) throw DimensionError("factor has non-finite entries");
  }
}

CovarianceMode GaussianReference::native_mode() const {
  return std::holds_alternative<DiagonalCovariance>(covariance_) ? CovarianceMode::kDiagonal
                                                                 : CovarianceMode::kLowRank;
}

Vector GaussianReference::variances() const {
  if (const auto* diag = std::get_if<DiagonalCovariance>(&covariance_)) return diag->variances;
  return std::get<LowRankCovariance>(covariance_).factor.rowwise().squaredNorm();
}

Matrix GaussianReference::factor() const {
  if (const auto* low = std::get_if<LowRankCovariance>(&covariance_)) return low->factor;
  return std::get<DiagonalCovariance>(covariance_).variances.cwiseSqrt().asDiagonal();
}

ReferenceEstimate estimate_reference(const Matrix& data, const EstimateOptions& options) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) throw DimensionError("at least 2 samples are required, got " + std::to_string(n));
  if (d == 0) throw DimensionError("samples have zero length");
  if (!data.allFinite()) throw DimensionError("data has non-finite entries");

  // Welford / Chan one-pass update.
  Vector mean = Vector::Zero(d);
  Vector m2 = Vector::Zero(d);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector delta = data.row(k).transpose() - mean;
    mean += delta / static_cast<double>(k + 1);
    m2.array() += delta.array() * (data.row(k).transpose() - mean).array();
  }

  if (options.mode == CovarianceMode::kDiagonal) {
    Vector var = (m2 / static_cast<double>(n - 1)).cwiseMax(0.0);
    return ReferenceEstimate{GaussianReference(mean, DiagonalCovariance{std::move(var)}), 0, 0,
                             false};
  }

  if (options.rank == 0) throw DimensionError("low-rank estimation needs rank >= 1");
  const auto max_rank = static_cast<std::size_t>(std::min(d, n - 1));
  const std::size_t rank = std::min(options.rank, max_rank);

  const Matrix centered = data.rowwise() - mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const auto r = static_cast<Eigen::Index>(rank);
  Matrix factor = svd.matrixV().leftCols(r) * svd.singularValues().head(r).asDiagonal();
  factor /= std::sqrt(static_cast<double>(n - 1));
  // Fix the SVD sign ambiguity: largest-magnitude entry of each column positive.
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::Index arg = 0;
    factor.col(c).cwiseAbs().maxCoeff(&arg);
    if (factor(arg, c) < 0.0) factor.col(c) *= -1.0;
  }
  return ReferenceEstimate{GaussianReference(mean, LowRankCovariance{std::move(factor)}),
                           options.rank, rank, rank < options.rank};
}

RelevanceScores::RelevanceScores(Vector values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_(i);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DimensionError("relevance score " + std::to_string(i) + " = " + std::to_string(v) +
                           " is outside [0,1]");
    }
  }
}

RelevanceScores RelevanceScores::constant(std::size_t dim, double value) {
  return RelevanceScores(Vector::Constant(static_cast<Eigen::Index>(dim), value));
}

Vector MomentState::stddev() const {
  if (mode == CovarianceMode::kDiagonal) return variance.cwiseMax(0.0).cwiseSqrt();
  return factor.rowwise().norm();
}

MomentState input_moments(const GaussianReference& ref, const Vector& x, const RelevanceScores& s,
                          CovarianceMode mode) {
  const auto d = static_cast<Eigen::Index>(ref.dim());
  if (x.size() != d || static_cast<Eigen::Index>(s.dim()) != d) {
    throw DimensionError("input_moments: reference dim " + std::to_string(d) + ", x " +
                         std::to_string(x.size()) + ", s " + std::to_string(s.dim()));
  }
  const Vector& sv = s.values();
  const Vector keep = Vector::Ones(d) - sv;
  MomentState state;
  state.mode = mode;
  state.mean = x.cwiseProduct(sv) + ref.mean().cwiseProduct(keep);
  if (mode == CovarianceMode::kDiagonal) {
    state.variance = keep.cwiseAbs2().cwiseProduct(ref.variances());
  } else {
    state.factor = keep.asDiagonal() * ref.factor();
  }
  return state;
}

MomentState input_moments(const GaussianReference& ref, const Vector& x, const RelevanceScores& s) {
  return input_moments(ref, x, s, ref.native_mode());
}

Vector draw_reference_noise(const GaussianReference& ref, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 gen = stream(seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (const auto* diag = std::get_if<DiagonalCovariance>(&ref.covariance())) {
    Vector n(ref.mean().size());
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      n(i) = ref.mean()(i) + std::sqrt(diag->variances(i)) * normal(gen);
    }
    return n;
  }
  const Matrix& q = std::get<LowRankCovariance>(ref.covariance()).factor;
  Vector g(q.cols());
  for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = normal(gen);
  return ref.mean() + q * g;
}

Vector obfuscate(const Vector& x, const RelevanceScores& s, const Vector& noise) {
  const Vector& sv = s.values();
  return x.cwiseProduct(sv) + noise.cwiseProduct(Vector::Ones(sv.size()) - sv);
}

Matrix sample_obfuscation(const GaussianReference& ref, const Vector& x, const RelevanceScores& s,
                          std::size_t count, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(ref.dim());
  if (x.size() != d || static_cast<Eigen::Index>(s.dim()) != d) {
    throw DimensionError("sample_obfuscation: dimension mismatch");
  }
  if (count == 0) throw DimensionError("sample_obfuscation: count must be >= 1");
  Matrix out(static_cast<Eigen::Index>(count), d);
  for (std::size_t j = 0; j < count; ++j) {
    out.row(static_cast<Eigen::Index>(j)) = obfuscate(x, s, draw_reference_noise(ref, seed, j));
  }
  return out;
}

}  // namespace rde
