#include "rde/discrete.hpp"

#include <gtest/gtest.h>

#include "rde/synthetic.hpp"

namespace rde {
namespace {

std::vector<std::uint8_t> bits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) out.push_back(static_cast<std::uint8_t>(c - '0'));
  return out;
}

BooleanClassifier and2() { return BooleanClassifier::from_truth_table(2, bits("0001")); }
BooleanClassifier or3() { return BooleanClassifier::from_truth_table(3, bits("01111111")); }

// ½·mean((Φ(x) - Φ(y))²) over all completions, counted directly.
Rational definitional_distortion(const BooleanClassifier& phi, const BitVector& x, const IndexSet& subset) {
  const std::size_t d = phi.dim();
  std::int64_t mismatches = 0;
  std::int64_t total = 0;
  const bool target = phi.evaluate(encode_bits(x));
  for (std::uint32_t y = 0; y < (1U << d); ++y) {
    bool consistent = true;
    for (std::size_t i : subset) consistent &= ((y >> i) & 1U) == x[i];
    if (!consistent) continue;
    ++total;
    if (phi.evaluate(y) != target) ++mismatches;
  }
  return Rational(mismatches, 2 * total);
}

TEST(RationalTest, ParseAndCompare) {
  EXPECT_EQ(Rational::parse("3/4"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("0.75"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("1"), Rational(1));
  EXPECT_EQ(Rational::parse("6/8").to_string(), "3/4");
  EXPECT_TRUE(Rational(1, 2) < Rational(3, 4));
  EXPECT_TRUE(Rational(1, 2) >= Rational(2, 4));
  EXPECT_THROW(Rational::parse("x/2"), std::invalid_argument);
  EXPECT_THROW(Rational(1, 0), std::invalid_argument);
}

TEST(ConditionalProbabilityTest, HandCases) {
  EXPECT_EQ(conditional_probability(and2(), {1, 1}, {0}), Rational(1, 2));
  EXPECT_EQ(conditional_probability(and2(), {1, 1}, {0, 1}), Rational(1));
  EXPECT_EQ(conditional_probability(or3(), {1, 0, 0}, {0}), Rational(1));
}

TEST(ConditionalProbabilityTest, GuardRejectsLargeInstances) {
  synthetic::RandomNetworkSpec spec{26, {2}, 1, 1.0, 0.1};
  const auto phi = BooleanClassifier::from_network(synthetic::random_network(spec, 1));
  EXPECT_THROW(conditional_probability(phi, BitVector(26, 0), {}), InstanceTooLarge);
  EXPECT_NO_THROW(conditional_probability(phi, BitVector(26, 0), {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18}));
}

TEST(DeltaRelevanceTest, HandCases) {
  EXPECT_TRUE(is_delta_relevant(and2(), {1, 1}, {0}, Rational(1, 2)));
  EXPECT_FALSE(is_delta_relevant(and2(), {1, 1}, {0}, Rational(3, 4)));
  EXPECT_TRUE(is_delta_relevant(or3(), {0, 1, 1}, {0, 1, 2}, Rational(1)));
}

TEST(MinRelevantInputTest, HandCases) {
  const DiscreteSolution half = min_relevant_input(and2(), {1, 1}, Rational(1, 2));
  EXPECT_EQ(half.min_size, 1u);
  EXPECT_EQ(half.witness, IndexSet({0}));

  const DiscreteSolution strict = min_relevant_input(and2(), {1, 1}, Rational(3, 4));
  EXPECT_EQ(strict.min_size, 2u);
  EXPECT_EQ(strict.witness, IndexSet({0, 1}));
  EXPECT_EQ(strict.achieved_probability, Rational(1));

  const DiscreteSolution orsol = min_relevant_input(or3(), {1, 0, 0}, Rational(1));
  EXPECT_EQ(orsol.min_size, 1u);
  EXPECT_EQ(orsol.witness, IndexSet({0}));

  const auto constant = BooleanClassifier::from_truth_table(3, bits("11111111"));
  const DiscreteSolution c = min_relevant_input(constant, {0, 1, 0}, Rational(1));
  EXPECT_EQ(c.min_size, 0u);
  EXPECT_TRUE(c.witness.empty());
}

TEST(MinRelevantInputTest, WitnessIsLexicographicallyFirst) {
  // XOR of components 1 and 2 ignoring 0: any minimal set is {1,2}.
  const auto phi = BooleanClassifier::from_truth_table(3, bits("00111100"));
  const DiscreteSolution sol = min_relevant_input(phi, {0, 1, 0}, Rational(1));
  EXPECT_EQ(sol.witness, IndexSet({1, 2}));
  // Φ = x0 OR x1 at x = (1,1,0): {0} and {1} both work; {0} comes first.
  const auto or01 = BooleanClassifier::from_truth_table(3, bits("01110111"));
  EXPECT_EQ(min_relevant_input(or01, {1, 1, 0}, Rational(1)).witness, IndexSet({0}));
}

TEST(MinRelevantInputTest, GuardRejectsLargeInstances) {
  const auto phi = BooleanClassifier::from_truth_table(17, std::vector<std::uint8_t>(1U << 17, 0));
  EXPECT_THROW(min_relevant_input(phi, BitVector(17, 0), Rational(1)), InstanceTooLarge);
}

TEST(ExactRateDistortionTest, HandCases) {
  const auto curve = exact_rate_distortion(and2(), {1, 1}, {0.0, 0.25, 0.5});
  EXPECT_EQ(curve[0].rate, 2u);
  EXPECT_EQ(curve[1].rate, 1u);
  EXPECT_EQ(curve[2].rate, 0u);
}

TEST(ExactRateDistortionTest, SetDistortionMatchesDefinition) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 3 + seed % 5;
    std::vector<std::uint8_t> table(std::size_t{1} << d);
    const Vector u = synthetic::uniform_vector(table.size(), seed);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = u(static_cast<Eigen::Index>(i)) < 0.4;
    const auto phi = BooleanClassifier::from_truth_table(d, table);
    const Vector xu = synthetic::uniform_vector(d, seed + 100);
    BitVector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = xu(static_cast<Eigen::Index>(i)) < 0.5;
    for (std::uint32_t mask = 0; mask < (1U << d); ++mask) {
      IndexSet subset;
      for (std::size_t i = 0; i < d; ++i) {
        if ((mask >> i) & 1U) subset.push_back(i);
      }
      EXPECT_EQ(set_distortion(phi, x, subset), definitional_distortion(phi, x, subset));
    }
  }
}

TEST(ExactRateDistortionTest, NonIncreasingInEpsilon) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t d = 6;
    std::vector<std::uint8_t> table(64);
    const Vector u = synthetic::uniform_vector(64, seed + 7);
    for (std::size_t i = 0; i < 64; ++i) table[i] = u(static_cast<Eigen::Index>(i)) < 0.5;
    const auto phi = BooleanClassifier::from_truth_table(d, table);
    std::vector<double> eps;
    for (int k = 0; k <= 20; ++k) eps.push_back(k / 40.0);
    const auto curve = exact_rate_distortion(phi, BitVector{1, 0, 1, 1, 0, 0}, eps);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].rate, curve[i - 1].rate);
    EXPECT_EQ(curve.back().rate, 0u);
    for (const auto& p : curve) EXPECT_EQ(p.witness.size(), p.rate);
  }
}

TEST(BooleanClassifierTest, TruthTableAndNetworkAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 2 + seed % 9;
    synthetic::RandomNetworkSpec spec{d, {6}, 1, 2.0, 0.5};
    const auto net_phi = BooleanClassifier::from_network(synthetic::random_network(spec, seed));
    const auto table_phi = net_phi.materialize();
    const Vector xu = synthetic::uniform_vector(d, seed + 1);
    BitVector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = xu(static_cast<Eigen::Index>(i)) < 0.5;
    for (std::uint32_t mask = 0; mask < (1U << d); mask += 1 + mask / 3) {
      IndexSet subset;
      for (std::size_t i = 0; i < d; ++i) {
        if ((mask >> i) & 1U) subset.push_back(i);
      }
      EXPECT_EQ(conditional_probability(net_phi, x, subset), conditional_probability(table_phi, x, subset));
    }
  }
}

TEST(BooleanClassifierTest, RejectsBadTables) {
  EXPECT_THROW(BooleanClassifier::from_truth_table(2, bits("000")), std::invalid_argument);
  EXPECT_THROW(BooleanClassifier::from_truth_table(0, {}), std::invalid_argument);
  EXPECT_THROW(BooleanClassifier::from_truth_table(1, {0, 2}), std::invalid_argument);
}

}  // namespace
}  // namespace rde
