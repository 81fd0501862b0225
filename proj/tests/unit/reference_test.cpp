#include "rde/reference.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rde/synthetic.hpp"

namespace rde {
namespace {

// Sample covariance with explicit loops, N-1 divisor.
Matrix covariance_oracle(const Matrix& data) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) mean[static_cast<std::size_t>(i)] += data(k, i) / n;
  }
  Matrix cov = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        cov(i, j) += (data(k, i) - mean[static_cast<std::size_t>(i)]) *
                     (data(k, j) - mean[static_cast<std::size_t>(j)]) / static_cast<double>(n - 1);
      }
    }
  }
  return cov;
}

TEST(EstimateReferenceTest, TwoPointDiagonal) {
  Matrix data(2, 2);
  data << 0, 0, 2, 2;
  const auto est = estimate_reference(data, {CovarianceMode::kDiagonal, 0});
  EXPECT_DOUBLE_EQ(est.reference.mean()(0), 1.0);
  EXPECT_DOUBLE_EQ(est.reference.mean()(1), 1.0);
  EXPECT_DOUBLE_EQ(est.reference.variances()(0), 2.0);
  EXPECT_DOUBLE_EQ(est.reference.variances()(1), 2.0);
}

TEST(EstimateReferenceTest, IdenticalSamplesHaveZeroVariance) {
  Matrix data = Matrix::Constant(10, 3, 0.37);
  const auto est = estimate_reference(data);
  EXPECT_TRUE((est.reference.variances().array() == 0.0).all());
}

TEST(EstimateReferenceTest, FullRankFactorReproducesSampleCovariance) {
  const Matrix data = synthetic::uniform_data(100, 6, 42);
  const auto est = estimate_reference(data, {CovarianceMode::kLowRank, 6});
  EXPECT_FALSE(est.rank_reduced);
  const Matrix q = est.reference.factor();
  ASSERT_EQ(q.cols(), 6);
  EXPECT_LT((q * q.transpose() - covariance_oracle(data)).cwiseAbs().maxCoeff(), 1e-8);

  const auto diag = estimate_reference(data, {CovarianceMode::kDiagonal, 0});
  EXPECT_LT((est.reference.variances() - diag.reference.variances()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((est.reference.mean() - diag.reference.mean()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EstimateReferenceTest, TruncatedFactorIsBestApproximation) {
  const Matrix data = synthetic::uniform_data(50, 8, 3);
  const auto est = estimate_reference(data, {CovarianceMode::kLowRank, 3});
  const Matrix q = est.reference.factor();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance_oracle(data));
  // Residual spectral norm equals the 4th largest eigenvalue.
  Eigen::SelfAdjointEigenSolver<Matrix> res(covariance_oracle(data) - q * q.transpose());
  EXPECT_NEAR(res.eigenvalues().cwiseAbs().maxCoeff(), eig.eigenvalues()(8 - 4), 1e-10);
}

TEST(EstimateReferenceTest, RankIsReducedWithFlag) {
  const Matrix data = synthetic::uniform_data(5, 10, 1);
  const auto est = estimate_reference(data, {CovarianceMode::kLowRank, 30});
  EXPECT_TRUE(est.rank_reduced);
  EXPECT_EQ(est.rank, 4u);
  EXPECT_EQ(est.requested_rank, 30u);
  EXPECT_EQ(est.reference.factor().cols(), 4);
}

TEST(EstimateReferenceTest, Errors) {
  EXPECT_THROW(estimate_reference(Matrix::Zero(1, 3)), DimensionError);
  EXPECT_THROW(estimate_reference(Matrix::Zero(4, 3), {CovarianceMode::kLowRank, 0}), DimensionError);
}

TEST(RelevanceScoresTest, RejectsOutOfRange) {
  Vector v(2);
  v << 0.5, 1.5;
  EXPECT_THROW(RelevanceScores{v}, DimensionError);
  v << -0.1, 0.5;
  EXPECT_THROW(RelevanceScores{v}, DimensionError);
  v << 0.0, 1.0;
  EXPECT_NO_THROW(RelevanceScores{v});
}

TEST(InputMomentsTest, FullyRelevantIsDeterministic) {
  const GaussianReference ref = synthetic::random_low_rank_reference(5, 3, 1);
  const Vector x = synthetic::uniform_vector(5, 2);
  const auto s = RelevanceScores::constant(5, 1.0);
  const MomentState diag = input_moments(ref, x, s, CovarianceMode::kDiagonal);
  const MomentState low = input_moments(ref, x, s, CovarianceMode::kLowRank);
  EXPECT_EQ(diag.mean, x);
  EXPECT_EQ(low.mean, x);
  EXPECT_TRUE((diag.variance.array() == 0.0).all());
  EXPECT_TRUE((low.factor.array() == 0.0).all());
}

TEST(InputMomentsTest, NothingRelevantIsPureNoise) {
  const GaussianReference ref = synthetic::random_diagonal_reference(4, 9);
  const Vector x = synthetic::uniform_vector(4, 2);
  const MomentState m = input_moments(ref, x, RelevanceScores::constant(4, 0.0));
  EXPECT_EQ(m.mean, ref.mean());
  EXPECT_EQ(m.variance, ref.variances());
}

TEST(InputMomentsTest, HandExample) {
  Vector mean = Vector::Zero(2);
  Vector var(2);
  var << 1, 4;
  const GaussianReference ref(mean, DiagonalCovariance{var});
  Vector x(2);
  x << 1, 0;
  Vector s(2);
  s << 0.5, 0.25;
  const MomentState m = input_moments(ref, x, RelevanceScores(s));
  EXPECT_DOUBLE_EQ(m.mean(0), 0.5);
  EXPECT_DOUBLE_EQ(m.mean(1), 0.0);
  EXPECT_DOUBLE_EQ(m.variance(0), 0.25);
  EXPECT_DOUBLE_EQ(m.variance(1), 2.25);
}

TEST(InputMomentsTest, LowRankFactorRowsAreScaled) {
  const GaussianReference ref = synthetic::random_low_rank_reference(4, 2, 5);
  const Vector x = synthetic::uniform_vector(4, 6);
  const Vector s = synthetic::uniform_vector(4, 7);
  const MomentState m = input_moments(ref, x, RelevanceScores(s));
  const Matrix q = ref.factor();
  const Vector keep = Vector::Ones(4) - s;
  const Matrix expected_cov = keep.asDiagonal() * (q * q.transpose()) * keep.asDiagonal();
  EXPECT_LT((m.factor * m.factor.transpose() - expected_cov).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(InputMomentsTest, DimensionMismatch) {
  const GaussianReference ref = synthetic::random_diagonal_reference(4, 9);
  EXPECT_THROW(input_moments(ref, Vector::Zero(3), RelevanceScores::constant(4, 0.5)), DimensionError);
}

TEST(SampleObfuscationTest, FullyRelevantRowsEqualInput) {
  const GaussianReference ref = synthetic::random_diagonal_reference(6, 9);
  const Vector x = synthetic::uniform_vector(6, 3);
  const Matrix rows = sample_obfuscation(ref, x, RelevanceScores::constant(6, 1.0), 50, 11);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) EXPECT_EQ(Vector(rows.row(r).transpose()), x);
}

TEST(SampleObfuscationTest, DeterministicPerSeed) {
  const GaussianReference ref = synthetic::random_low_rank_reference(6, 2, 9);
  const Vector x = synthetic::uniform_vector(6, 3);
  const auto s = RelevanceScores::constant(6, 0.3);
  EXPECT_EQ(sample_obfuscation(ref, x, s, 20, 5), sample_obfuscation(ref, x, s, 20, 5));
  EXPECT_NE(sample_obfuscation(ref, x, s, 20, 5), sample_obfuscation(ref, x, s, 20, 6));
}

// Empirical moments of 1e5 draws against input_moments, within 4 standard
// errors componentwise.
void check_empirical_moments(const GaussianReference& ref, CovarianceMode mode) {
  const std::size_t d = ref.dim();
  const Vector x = synthetic::uniform_vector(d, 31);
  const Vector s = synthetic::uniform_vector(d, 32);
  const MomentState m = input_moments(ref, x, RelevanceScores(s), mode);
  const Vector var = mode == CovarianceMode::kDiagonal ? m.variance : Vector(m.factor.rowwise().squaredNorm());
  const std::size_t n = 100000;
  const Matrix rows = sample_obfuscation(ref, x, RelevanceScores(s), n, 77);
  const Vector mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - mean.transpose();
  const Vector emp_var = centered.colwise().squaredNorm().transpose() / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double se_mean = std::sqrt(var(k) / n);
    const double se_var = var(k) * std::sqrt(2.0 / (n - 1));
    EXPECT_LE(std::abs(mean(k) - m.mean(k)), 4.0 * se_mean + 1e-15) << i;
    EXPECT_LE(std::abs(emp_var(k) - var(k)), 4.0 * se_var + 1e-15) << i;
  }
  if (mode == CovarianceMode::kLowRank) {
    // Off-diagonal covariances: SE of a sample covariance ≈ sqrt((σ_i²σ_j² + c_ij²)/n).
    const Matrix emp_cov = centered.transpose() * centered / static_cast<double>(n - 1);
    const Matrix cov = m.factor * m.factor.transpose();
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
        EXPECT_LE(std::abs(emp_cov(i, j) - cov(i, j)), 4.0 * se) << i << "," << j;
      }
    }
  }
}

TEST(SampleObfuscationTest, EmpiricalMomentsMatchDiagonal) {
  check_empirical_moments(synthetic::random_diagonal_reference(5, 4), CovarianceMode::kDiagonal);
}

TEST(SampleObfuscationTest, EmpiricalMomentsMatchLowRank) {
  check_empirical_moments(synthetic::random_low_rank_reference(5, 2, 4), CovarianceMode::kLowRank);
}

TEST(SampleObfuscationTest, PureNoiseMeanWithinStandardErrors) {
  const GaussianReference ref = synthetic::random_diagonal_reference(3, 12);
  const Vector x = Vector::Constant(3, 5.0);
  const std::size_t n = 20000;
  const Matrix rows = sample_obfuscation(ref, x, RelevanceScores::constant(3, 0.0), n, 1);
  const Vector mean = rows.colwise().mean().transpose();
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(mean(i) - ref.mean()(i)), 4.0 * std::sqrt(ref.variances()(i) / n));
  }
}

}  // namespace
}  // namespace rde
