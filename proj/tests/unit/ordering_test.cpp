#include "rde/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "rde/mc.hpp"
#include "rde/synthetic.hpp"

namespace rde {
namespace {

std::vector<std::size_t> planted_first(const synthetic::PlantedTask& task) {
  std::vector<std::size_t> order = task.relevant;
  for (std::size_t i = 0; i < task.net.input_dim(); ++i) {
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  }
  return order;
}

TEST(OrderingFromScoresTest, StrictDescending) {
  const std::vector<double> s{0.9, 0.1, 0.5};
  EXPECT_EQ(ordering_from_scores(s, 1), (std::vector<std::size_t>{0, 2, 1}));
}

TEST(OrderingFromScoresTest, Deterministic) {
  const std::vector<double> s(10, 0.3);
  EXPECT_EQ(ordering_from_scores(s, 42), ordering_from_scores(s, 42));
}

TEST(OrderingFromScoresTest, TiesAreUniform) {
  const std::vector<double> s(4, 0.5);
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) ++counts[ordering_from_scores(s, static_cast<std::uint64_t>(seed))];
  ASSERT_EQ(counts.size(), 24u);
  const double p = 1.0 / 24.0;
  const double expected = trials * p;
  const double sigma = std::sqrt(trials * p * (1 - p));
  double chi2 = 0.0;
  for (const auto& [perm, count] : counts) {
    EXPECT_LE(std::abs(count - expected), 5.0 * sigma);
    chi2 += (count - expected) * (count - expected) / expected;
  }
  // 23 degrees of freedom; the 0.999 quantile is 49.7.
  EXPECT_LT(chi2, 49.7);
}

TEST(OrderingFromScoresTest, TiesOnlyPermuteWithinGroups) {
  const std::vector<double> s{0.2, 0.8, 0.2, 0.8, 0.5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto order = ordering_from_scores(s, seed);
    std::vector<std::size_t> top(order.begin(), order.begin() + 2);
    std::sort(top.begin(), top.end());
    EXPECT_EQ(top, (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(order[2], 4u);
  }
}

TEST(ComponentsAtRateTest, Rounding) {
  EXPECT_EQ(components_at_rate(3.0 / 20.0, 20), 3u);
  EXPECT_EQ(components_at_rate(0.0, 20), 0u);
  EXPECT_EQ(components_at_rate(1.0, 20), 20u);
  EXPECT_EQ(components_at_rate(0.01, 20), 1u);
  EXPECT_EQ(components_at_rate(0.5, 7), 4u);
}

TEST(UniformRatesTest, Grid) {
  const auto r = uniform_rates(64);
  ASSERT_EQ(r.size(), 64u);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_EQ(default_samples(784), 512u);
  EXPECT_EQ(default_samples(27648), 64u);
}

TEST(EvaluateOrderingTest, EndpointsAndPlantedExactness) {
  const synthetic::PlantedTask task = synthetic::planted_task(20, 3, 7);
  OrderingOptions options;
  options.rates = {0.0, 0.05, 0.1, 3.0 / 20.0, 0.5, 1.0};
  options.samples = 256;
  options.seed = 3;
  const auto order = planted_first(task);
  const RateDistortionCurve curve = evaluate_ordering(task.net, task.reference, task.x, order, options);
  EXPECT_EQ(curve.points.back().distortion, 0.0);
  EXPECT_LT(curve.points[3].distortion, 1e-10);
  EXPECT_EQ(curve.samples_per_point, 256u);
  EXPECT_EQ(curve.images_averaged, 1u);

  // Rate 0 is the s = 0 distortion, drawn here with independent noise.
  const McEstimate mc = mc_distortion(task.net, task.reference, task.x,
                                      RelevanceScores::constant(20, 0.0), 20000, 99);
  const CurvePoint& zero = curve.points.front();
  EXPECT_LE(std::abs(zero.distortion - mc.estimate),
            4.0 * std::hypot(zero.standard_error, mc.standard_error));
}

TEST(EvaluateOrderingTest, ClampKeepsRateOneExact) {
  const synthetic::PlantedTask task = synthetic::planted_task(10, 3, 2);
  OrderingOptions options;
  options.rates = uniform_rates(5);
  options.samples = 64;
  options.clamp = true;
  std::vector<std::size_t> order(10);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto curve = evaluate_ordering(task.net, task.reference, task.x, order, options);
  EXPECT_EQ(curve.points.back().distortion, 0.0);
}

TEST(EvaluateOrderingTest, Validation) {
  const synthetic::PlantedTask task = synthetic::planted_task(5, 2, 2);
  std::vector<std::size_t> order{0, 1, 2, 3, 4};
  OrderingOptions options;
  options.samples = 16;
  options.rates = {0.5, 0.2};
  EXPECT_THROW(evaluate_ordering(task.net, task.reference, task.x, order, options), DimensionError);
  options.rates = {0.0, 1.5};
  EXPECT_THROW(evaluate_ordering(task.net, task.reference, task.x, order, options), DimensionError);
  options.rates = {0.0, 1.0};
  std::vector<std::size_t> bad{0, 1, 1, 3, 4};
  EXPECT_THROW(evaluate_ordering(task.net, task.reference, task.x, bad, options), DimensionError);
  EXPECT_THROW(evaluate_ordering(task.net, task.reference, Vector::Zero(4), order, options), DimensionError);
}

TEST(EvaluateBatchTest, SingleAndDuplicatedImages) {
  const synthetic::PlantedTask task = synthetic::planted_task(12, 3, 4);
  const Vector map = synthetic::uniform_vector(12, 8);
  OrderingOptions options;
  options.rates = uniform_rates(7);
  options.samples = 128;
  options.seed = 21;
  const auto order = ordering_from_scores(std::span<const double>(map.data(), 12), options.seed);
  const auto single = evaluate_ordering(task.net, task.reference, task.x, order, options);
  const auto batch1 = evaluate_batch(task.net, task.reference, {task.x}, {map}, options);
  const auto batch2 = evaluate_batch(task.net, task.reference, {task.x, task.x}, {map, map}, options, 2);
  ASSERT_EQ(single.points.size(), batch1.points.size());
  for (std::size_t i = 0; i < single.points.size(); ++i) {
    EXPECT_EQ(single.points[i].distortion, batch1.points[i].distortion);
    EXPECT_EQ(single.points[i].standard_error, batch1.points[i].standard_error);
    EXPECT_EQ(single.points[i].distortion, batch2.points[i].distortion);
    EXPECT_EQ(single.points[i].standard_error, batch2.points[i].standard_error);
  }
  EXPECT_EQ(batch2.images_averaged, 2u);
  EXPECT_THROW(evaluate_batch(task.net, task.reference, {task.x}, {map, map}, options), DimensionError);
}

TEST(EvaluateBatchTest, IndependentOfThreadCount) {
  std::vector<Vector> images;
  std::vector<Vector> maps;
  const synthetic::PlantedTask task = synthetic::planted_task(10, 3, 5);
  for (std::uint64_t k = 0; k < 5; ++k) {
    images.push_back(synthetic::uniform_vector(10, 50 + k));
    maps.push_back(synthetic::uniform_vector(10, 60 + k));
  }
  OrderingOptions options;
  options.rates = uniform_rates(9);
  options.samples = 64;
  const auto a = evaluate_batch(task.net, task.reference, images, maps, options, 1);
  const auto b = evaluate_batch(task.net, task.reference, images, maps, options, 4);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].distortion, b.points[i].distortion);
    EXPECT_EQ(a.points[i].standard_error, b.points[i].standard_error);
  }
}

TEST(EvaluateBatchTest, PlantedOrderingDominatesRandom) {
  const synthetic::PlantedTask task = synthetic::planted_task(20, 3, 11);
  Vector informed = Vector::Zero(20);
  for (std::size_t i : task.relevant) informed(static_cast<Eigen::Index>(i)) = 1.0;
  const Vector flat = Vector::Constant(20, 0.5);
  OrderingOptions options;
  options.rates = uniform_rates(21);
  options.samples = 512;
  options.seed = 5;
  const auto good = evaluate_batch(task.net, task.reference, {task.x}, {informed}, options);
  const auto rand = evaluate_batch(task.net, task.reference, {task.x}, {flat}, options);
  for (std::size_t i = 0; i < good.points.size(); ++i) {
    if (good.points[i].rate > 0.5) break;
    EXPECT_LE(good.points[i].distortion,
              rand.points[i].distortion +
                  4.0 * std::hypot(good.points[i].standard_error, rand.points[i].standard_error));
  }
  EXPECT_LT(trapezoid_auc(good), trapezoid_auc(rand));
}

TEST(TrapezoidAucTest, KnownArea) {
  RateDistortionCurve curve;
  curve.points = {{0.0, 1.0, 0.0}, {0.5, 0.5, 0.0}, {1.0, 0.0, 0.0}};
  EXPECT_DOUBLE_EQ(trapezoid_auc(curve), 0.5);
}

}  // namespace
}  // namespace rde
