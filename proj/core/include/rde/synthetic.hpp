#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rde/network.hpp"
#include "rde/reference.hpp"

// Generators for randomized test instances and planted-relevance tasks.
namespace rde::synthetic {

struct RandomNetworkSpec {
  std::size_t input_dim = 4;
  std::vector<std::size_t> hidden;  // ReLU layer widths
  std::size_t outputs = 1;
  double weight_scale = 1.0;  // weights ~ N(0, scale² / fan_in)
  double bias_scale = 0.1;
};

NeuralNetwork random_network(const RandomNetworkSpec& spec, std::uint64_t seed);

/// Affine-only network (identity activations throughout).
NeuralNetwork random_affine_network(std::size_t input_dim, std::vector<std::size_t> widths,
                                    std::uint64_t seed);

struct PlantedTask {
  NeuralNetwork net;
  std::vector<std::size_t> relevant;  // sorted
  Vector x;
  GaussianReference reference;
};

/// Network with one ReLU layer whose weights vanish outside a random set of
/// `relevant_count` inputs, together with an input x ~ U[0,1]^d and a
/// diagonal reference estimated from `reference_samples` uniform samples.
PlantedTask planted_task(std::size_t dim, std::size_t relevant_count, std::uint64_t seed,
                         std::size_t hidden = 8, double weight_scale = 3.0,
                         std::size_t reference_samples = 500);

/// Uniform [0,1] data, one sample per row.
Matrix uniform_data(std::size_t rows, std::size_t cols, std::uint64_t seed);

Vector uniform_vector(std::size_t dim, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

/// Diagonal reference with random mean and variances in [0.05, 1].
GaussianReference random_diagonal_reference(std::size_t dim, std::uint64_t seed);

/// Low-rank reference with a d×r Gaussian factor.
GaussianReference random_low_rank_reference(std::size_t dim, std::size_t rank, std::uint64_t seed);

}  // namespace rde::synthetic
