#include "rde/network.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rde {

namespace {

std::string layer_prefix(std::size_t index) { return "layer " + std::to_string(index) + ": "; }

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

NetworkError::NetworkError(const std::string& what, std::optional<std::size_t> layer)
    : std::runtime_error(layer ? layer_prefix(*layer) + what : what), layer_(layer) {}

NeuralNetwork::NeuralNetwork(std::size_t input_dim, std::vector<AffineLayer> layers,
                             std::size_t output_index)
    : input_dim_(input_dim), layers_(std::move(layers)), output_index_(output_index) {
  if (input_dim_ == 0) throw NetworkError("input_dim must be positive");
  if (layers_.empty()) throw NetworkError("network has no layers");
  std::size_t width = input_dim_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const AffineLayer& layer = layers_[i];
    if (layer.output_width() == 0) throw NetworkError("layer has zero output width", i);
    if (layer.input_width() != width) {
      throw NetworkError("weights have " + std::to_string(layer.input_width()) +
                             " columns but the incoming width is " + std::to_string(width),
                         i);
    }
    if (static_cast<std::size_t>(layer.bias.size()) != layer.output_width()) {
      throw NetworkError("bias length " + std::to_string(layer.bias.size()) +
                             " does not match weight rows " + std::to_string(layer.output_width()),
                         i);
    }
    if (!all_finite(layer.weights) || !layer.bias.allFinite()) {
      throw NetworkError("non-finite entry", i);
    }
    width = layer.output_width();
  }
  if (layers_.back().activation != Activation::kIdentity) {
    throw NetworkError("final layer must use the identity activation", layers_.size() - 1);
  }
  if (output_index_ >= width) {
    throw NetworkError("output_index " + std::to_string(output_index_) +
                       " out of range for output width " + std::to_string(width));
  }
}

Vector NeuralNetwork::forward_all(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim_) {
    throw NetworkError("input has length " + std::to_string(x.size()) + ", expected " +
                           std::to_string(input_dim_),
                       0);
  }
  Vector h = x;
  for (const AffineLayer& layer : layers_) {
    h = layer.weights * h + layer.bias;
    if (layer.activation == Activation::kRelu) h = h.cwiseMax(0.0);
  }
  return h;
}

bool NeuralNetwork::operator==(const NeuralNetwork& other) const {
  if (input_dim_ != other.input_dim_ || output_index_ != other.output_index_ ||
      layers_.size() != other.layers_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const AffineLayer& a = layers_[i];
    const AffineLayer& b = other.layers_[i];
    if (a.activation != b.activation || a.weights.rows() != b.weights.rows() ||
        a.weights.cols() != b.weights.cols() || a.weights != b.weights || a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

double forward(const NeuralNetwork& net, const Vector& x) {
  const auto& layers = net.layers();
  if (static_cast<std::size_t>(x.size()) != net.input_dim()) {
    throw NetworkError("input has length " + std::to_string(x.size()) + ", expected " +
                           std::to_string(net.input_dim()),
                       0);
  }
  Vector h = x;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    h = (layers[i].weights * h + layers[i].bias);
    if (layers[i].activation == Activation::kRelu) h = h.cwiseMax(0.0);
  }
  // Only the selected row of the last layer is needed.
  const AffineLayer& last = layers.back();
  const auto row = static_cast<Eigen::Index>(net.output_index());
  return last.weights.row(row).dot(h) + last.bias(row);
}

// -- serialization -----------------------------------------------------------

namespace {

using nlohmann::json;

constexpr const char* kNonFinite = "__non_finite__";

// JSON has no literal for NaN/Inf; rewrite such tokens into a sentinel string
// so that the offending layer can be reported instead of a bare lexer error.
std::string mark_non_finite_tokens(std::string_view text) {
  static const std::regex token(R"((-?\b(NaN|nan|Infinity|inf)\b))");
  return std::regex_replace(std::string(text), token, std::string("\"") + kNonFinite + "\"");
}

double number_at(const json& value, std::size_t layer, const char* what) {
  if (value.is_string() && value.get<std::string>() == kNonFinite) {
    throw NetworkError(std::string("non-finite entry in ") + what, layer);
  }
  if (!value.is_number()) throw NetworkError(std::string("expected a number in ") + what, layer);
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw NetworkError(std::string("non-finite entry in ") + what, layer);
  return v;
}

AffineLayer parse_layer(const json& j, std::size_t index, std::size_t expected_cols) {
  if (!j.is_object()) throw NetworkError("layer must be an object", index);
  AffineLayer layer;

  const auto act = j.find("activation");
  if (act == j.end() || !act->is_string()) throw NetworkError("missing activation", index);
  const std::string name = act->get<std::string>();
  if (name == "relu") {
    layer.activation = Activation::kRelu;
  } else if (name == "identity") {
    layer.activation = Activation::kIdentity;
  } else {
    throw NetworkError("unknown activation '" + name + "'", index);
  }

  const auto w = j.find("weights");
  const auto b = j.find("bias");
  if (w == j.end() || !w->is_array()) throw NetworkError("missing weights array", index);
  if (b == j.end() || !b->is_array()) throw NetworkError("missing bias array", index);

  const std::size_t rows = w->size();
  if (rows == 0) throw NetworkError("weights have no rows", index);
  if (b->size() != rows) {
    throw NetworkError("bias length " + std::to_string(b->size()) + " does not match weight rows " +
                           std::to_string(rows),
                       index);
  }
  layer.weights.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(expected_cols));
  layer.bias.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = (*w)[r];
    if (!row.is_array()) throw NetworkError("weight row must be an array", index);
    if (row.size() != expected_cols) {
      throw NetworkError("weight row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                             " columns but the incoming width is " + std::to_string(expected_cols),
                         index);
    }
    for (std::size_t c = 0; c < expected_cols; ++c) {
      layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_at(row[c], index, "weights");
    }
    layer.bias(static_cast<Eigen::Index>(r)) = number_at((*b)[r], index, "bias");
  }
  return layer;
}

}  // namespace

NeuralNetwork load_network(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(mark_non_finite_tokens(json_text));
  } catch (const json::parse_error& e) {
    throw NetworkError(std::string("malformed network document: ") + e.what());
  } catch (const json::out_of_range& e) {
    throw NetworkError(std::string("non-finite number in network document: ") + e.what());
  }
  if (!doc.is_object()) throw NetworkError("network document must be a JSON object");

  const auto in = doc.find("input_dim");
  const auto out = doc.find("output_index");
  const auto layers = doc.find("layers");
  if (in == doc.end() || !in->is_number_unsigned()) {
    throw NetworkError("header: input_dim must be a non-negative integer");
  }
  if (out == doc.end() || !out->is_number_unsigned()) {
    throw NetworkError("header: output_index must be a non-negative integer");
  }
  if (layers == doc.end() || !layers->is_array() || layers->empty()) {
    throw NetworkError("header: layers must be a non-empty array");
  }

  const auto input_dim = in->get<std::size_t>();
  std::vector<AffineLayer> parsed;
  std::size_t width = input_dim;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    parsed.push_back(parse_layer((*layers)[i], i, width));
    width = parsed.back().output_width();
  }
  return NeuralNetwork(input_dim, std::move(parsed), out->get<std::size_t>());
}

std::string save_network(const NeuralNetwork& net) {
  json layers = json::array();
  for (const AffineLayer& layer : net.layers()) {
    json weights = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
      weights.push_back(std::move(row));
    }
    json bias = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) bias.push_back(layer.bias(r));
    layers.push_back({{"activation", layer.activation == Activation::kRelu ? "relu" : "identity"},
                      {"bias", std::move(bias)},
                      {"weights", std::move(weights)}});
  }
  json doc = {{"input_dim", net.input_dim()},
              {"output_index", net.output_index()},
              {"layers", std::move(layers)}};
  return doc.dump() + "\n";
}

NeuralNetwork load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetworkError("cannot open network file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return load_network(buffer.str());
  } catch (const NetworkError& e) {
    throw NetworkError(path.string() + ": " + e.what(), e.layer());
  }
}

void save_network_file(const NeuralNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NetworkError("cannot write network file " + path.string());
  out << save_network(net);
}

}  // namespace rde
