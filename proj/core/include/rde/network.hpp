#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rde/types.hpp"

namespace rde {

enum class Activation { kRelu, kIdentity };

struct AffineLayer {
  Matrix weights;  // rows = output width, cols = input width
  Vector bias;
  Activation activation = Activation::kIdentity;

  std::size_t input_width() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t output_width() const { return static_cast<std::size_t>(weights.rows()); }
};

/// Error raised for malformed networks. Carries the index of the offending
/// layer when one can be named.
class NetworkError : public std::runtime_error {
 public:
  explicit NetworkError(const std::string& what, std::optional<std::size_t> layer = std::nullopt);
  std::optional<std::size_t> layer() const { return layer_; }

 private:
  std::optional<std::size_t> layer_;
};

/// Feed-forward network of dense affine layers with ReLU or identity
/// activations. The scalar output is component `output_index` of the last
/// layer. Immutable after construction.
class NeuralNetwork {
 public:
  /// Validates the dimension chain, finiteness, the identity activation of
  /// the final layer and the output index. Throws NetworkError.
  NeuralNetwork(std::size_t input_dim, std::vector<AffineLayer> layers, std::size_t output_index);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_index() const { return output_index_; }
  const std::vector<AffineLayer>& layers() const { return layers_; }
  std::size_t output_width() const { return layers_.back().output_width(); }

  /// All output components of the last layer.
  Vector forward_all(const Vector& x) const;

  bool operator==(const NeuralNetwork& other) const;

 private:
  std::size_t input_dim_;
  std::vector<AffineLayer> layers_;
  std::size_t output_index_;
};

/// The selected scalar output of `net` at `x`.
double forward(const NeuralNetwork& net, const Vector& x);

NeuralNetwork load_network(std::string_view json_text);
std::string save_network(const NeuralNetwork& net);

NeuralNetwork load_network_file(const std::filesystem::path& path);
void save_network_file(const NeuralNetwork& net, const std::filesystem::path& path);

}  // namespace rde
