#include "rde/network.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rde/synthetic.hpp"

namespace rde {
namespace {

AffineLayer layer(Matrix w, Vector b, Activation act) { return AffineLayer{std::move(w), std::move(b), act}; }

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(NetworkTest, SingleAffineLayer) {
  NeuralNetwork net(1, {layer(mat({{2}}), vec({3}), Activation::kIdentity)}, 0);
  EXPECT_EQ(forward(net, vec({1})), 5.0);
}

TEST(NetworkTest, ReluKillsNegativePreactivation) {
  NeuralNetwork net(1,
                    {layer(mat({{-1}}), vec({0}), Activation::kRelu),
                     layer(mat({{1}}), vec({0}), Activation::kIdentity)},
                    0);
  EXPECT_EQ(forward(net, vec({1})), 0.0);
}

TEST(NetworkTest, OutputIndexSelectsComponent) {
  NeuralNetwork net(1, {layer(mat({{1}, {2}}), vec({0, 1}), Activation::kIdentity)}, 1);
  EXPECT_EQ(forward(net, vec({3})), 7.0);
}

TEST(NetworkTest, MatchesNaiveForwardOnRandomNets) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    synthetic::RandomNetworkSpec spec{5 + seed % 7, {8, 6}, 3, 1.5, 0.3};
    const NeuralNetwork net = synthetic::random_network(spec, seed);
    const Vector x = synthetic::uniform_vector(spec.input_dim, seed + 1000, -2.0, 2.0);
    const double expected = testing::naive_forward(net, x);
    EXPECT_NEAR(forward(net, x), expected, 1e-12 * std::max(1.0, std::abs(expected))) << seed;
    EXPECT_NEAR(net.forward_all(x)(0), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(NetworkTest, PositiveHomogeneityWithoutBiases) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    synthetic::RandomNetworkSpec spec{6, {10}, 1, 1.0, 0.0};
    const NeuralNetwork net = synthetic::random_network(spec, seed);
    const Vector x = synthetic::uniform_vector(6, seed + 7, -1.0, 1.0);
    for (double alpha : {0.0, 0.5, 2.0, 13.0}) {
      EXPECT_NEAR(forward(net, alpha * x), alpha * forward(net, x), 1e-12 * (1.0 + alpha));
    }
  }
}

TEST(NetworkTest, InputLengthMismatchNamesLayer) {
  NeuralNetwork net(2, {layer(mat({{1, 1}}), vec({0}), Activation::kIdentity)}, 0);
  try {
    forward(net, vec({1}));
    FAIL() << "expected NetworkError";
  } catch (const NetworkError& e) {
    ASSERT_TRUE(e.layer().has_value());
    EXPECT_EQ(*e.layer(), 0u);
  }
}

TEST(NetworkTest, ConstructorRejectsInvalidNetworks) {
  // Dimension chain.
  EXPECT_THROW(NeuralNetwork(2,
                             {layer(mat({{1, 1}}), vec({0}), Activation::kRelu),
                              layer(mat({{1, 1}}), vec({0}), Activation::kIdentity)},
                             0),
               NetworkError);
  // Final activation.
  EXPECT_THROW(NeuralNetwork(1, {layer(mat({{1}}), vec({0}), Activation::kRelu)}, 0), NetworkError);
  // Output index.
  EXPECT_THROW(NeuralNetwork(1, {layer(mat({{1}}), vec({0}), Activation::kIdentity)}, 1), NetworkError);
  // Bias length.
  EXPECT_THROW(NeuralNetwork(1, {layer(mat({{1}}), vec({0, 1}), Activation::kIdentity)}, 0), NetworkError);
  // Non-finite.
  EXPECT_THROW(NeuralNetwork(1, {layer(mat({{std::nan("")}}), vec({0}), Activation::kIdentity)}, 0),
               NetworkError);
}

TEST(NetworkSerializationTest, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synthetic::RandomNetworkSpec spec{7, {5, 4}, 2, 1.3, 0.7};
    const NeuralNetwork net = synthetic::random_network(spec, seed);
    const NeuralNetwork loaded = load_network(save_network(net));
    EXPECT_TRUE(loaded == net);
    EXPECT_EQ(save_network(loaded), save_network(net));
  }
}

TEST(NetworkSerializationTest, DimensionChainError) {
  const std::string text = R"({"input_dim": 2, "output_index": 0, "layers": [
    {"activation": "relu", "bias": [0, 0, 0], "weights": [[1, 0], [0, 1], [1, 1]]},
    {"activation": "identity", "bias": [0], "weights": [[1, 1]]}]})";
  try {
    load_network(text);
    FAIL() << "expected NetworkError";
  } catch (const NetworkError& e) {
    ASSERT_TRUE(e.layer().has_value());
    EXPECT_EQ(*e.layer(), 1u);
  }
}

TEST(NetworkSerializationTest, NanWeightReportsNonFiniteEntry) {
  const std::string text = R"({"input_dim": 1, "output_index": 0, "layers": [
    {"activation": "identity", "bias": [0], "weights": [[NaN]]}]})";
  try {
    load_network(text);
    FAIL() << "expected NetworkError";
  } catch (const NetworkError& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
    ASSERT_TRUE(e.layer().has_value());
    EXPECT_EQ(*e.layer(), 0u);
  }
}

TEST(NetworkSerializationTest, OverflowingLiteralIsNonFinite) {
  const std::string text = R"({"input_dim": 1, "output_index": 0, "layers": [
    {"activation": "identity", "bias": [1e999], "weights": [[1]]}]})";
  EXPECT_THROW(load_network(text), NetworkError);
}

TEST(NetworkSerializationTest, MalformedHeader) {
  EXPECT_THROW(load_network("{"), NetworkError);
  EXPECT_THROW(load_network(R"({"input_dim": -1, "output_index": 0, "layers": []})"), NetworkError);
  EXPECT_THROW(load_network(R"({"input_dim": 1, "output_index": 0, "layers": [
    {"activation": "tanh", "bias": [0], "weights": [[1]]}]})"),
               NetworkError);
}

}  // namespace
}  // namespace rde
