#include "rde/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rde/random.hpp"

namespace rde::synthetic {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale, SplitMix64& gen) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(gen);
  }
  return m;
}

Vector gaussian_vector(Eigen::Index n, double scale, SplitMix64& gen) {
  return gaussian_matrix(n, 1, scale, gen).col(0);
}

}  // namespace

NeuralNetwork random_network(const RandomNetworkSpec& spec, std::uint64_t seed) {
  SplitMix64 gen(stream_seed(seed, 1));
  std::vector<AffineLayer> layers;
  std::size_t width = spec.input_dim;
  auto add = [&](std::size_t out, Activation act) {
    const double scale = spec.weight_scale / std::sqrt(static_cast<double>(width));
    AffineLayer layer;
    layer.weights = gaussian_matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(width),
                                    scale, gen);
    layer.bias = gaussian_vector(static_cast<Eigen::Index>(out), spec.bias_scale, gen);
    layer.activation = act;
    layers.push_back(std::move(layer));
    width = out;
  };
  for (std::size_t h : spec.hidden) add(h, Activation::kRelu);
  add(spec.outputs, Activation::kIdentity);
  return NeuralNetwork(spec.input_dim, std::move(layers), 0);
}

NeuralNetwork random_affine_network(std::size_t input_dim, std::vector<std::size_t> widths,
                                    std::uint64_t seed) {
  SplitMix64 gen(stream_seed(seed, 2));
  std::vector<AffineLayer> layers;
  std::size_t width = input_dim;
  for (std::size_t out : widths) {
    AffineLayer layer;
    layer.weights = gaussian_matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(width),
                                    1.0 / std::sqrt(static_cast<double>(width)), gen);
    layer.bias = gaussian_vector(static_cast<Eigen::Index>(out), 0.1, gen);
    layer.activation = Activation::kIdentity;
    layers.push_back(std::move(layer));
    width = out;
  }
  return NeuralNetwork(input_dim, std::move(layers), 0);
}

Matrix uniform_data(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  SplitMix64 gen(stream_seed(seed, 3));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform(gen);
  }
  return m;
}

Vector uniform_vector(std::size_t dim, std::uint64_t seed, double lo, double hi) {
  SplitMix64 gen(stream_seed(seed, 4));
  std::uniform_real_distribution<double> uniform(lo, hi);
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(gen);
  return v;
}

GaussianReference random_diagonal_reference(std::size_t dim, std::uint64_t seed) {
  Vector mean = uniform_vector(dim, stream_seed(seed, 5));
  Vector var = uniform_vector(dim, stream_seed(seed, 6), 0.05, 1.0);
  return GaussianReference(std::move(mean), DiagonalCovariance{std::move(var)});
}

GaussianReference random_low_rank_reference(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  SplitMix64 gen(stream_seed(seed, 7));
  Vector mean = uniform_vector(dim, stream_seed(seed, 8));
  Matrix q = gaussian_matrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank),
                             1.0 / std::sqrt(static_cast<double>(rank)), gen);
  return GaussianReference(std::move(mean), LowRankCovariance{std::move(q)});
}

PlantedTask planted_task(std::size_t dim, std::size_t relevant_count, std::uint64_t seed,
                         std::size_t hidden, double weight_scale, std::size_t reference_samples) {
  SplitMix64 gen(stream_seed(seed, 9));
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), gen);
  std::vector<std::size_t> relevant(all.begin(),
                                    all.begin() + static_cast<std::ptrdiff_t>(relevant_count));
  std::sort(relevant.begin(), relevant.end());

  std::normal_distribution<double> normal(0.0, 1.0);
  AffineLayer first;
  first.weights = Matrix::Zero(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(dim));
  for (Eigen::Index h = 0; h < first.weights.rows(); ++h) {
    for (std::size_t j : relevant) first.weights(h, static_cast<Eigen::Index>(j)) = weight_scale * normal(gen);
  }
  first.bias = gaussian_vector(static_cast<Eigen::Index>(hidden), 0.5, gen);
  first.activation = Activation::kRelu;

  AffineLayer second;
  second.weights = gaussian_matrix(1, static_cast<Eigen::Index>(hidden), 1.0, gen);
  second.bias = Vector::Zero(1);
  second.activation = Activation::kIdentity;

  NeuralNetwork net(dim, {std::move(first), std::move(second)}, 0);
  Vector x = uniform_vector(dim, stream_seed(seed, 10));
  const Matrix data = uniform_data(reference_samples, dim, stream_seed(seed, 11));
  GaussianReference ref = estimate_reference(data, {CovarianceMode::kDiagonal, 0}).reference;
  return PlantedTask{std::move(net), std::move(relevant), std::move(x), std::move(ref)};
}

}  // namespace rde::synthetic
