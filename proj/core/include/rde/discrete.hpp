#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rde/network.hpp"

namespace rde {

/// Exact fraction with a positive denominator, kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator = 1);

  /// Accepts "p/q", integers and plain decimals such as "0.75".
  static Rational parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using BitVector = std::vector<std::uint8_t>;
using IndexSet = std::vector<std::size_t>;

/// Boolean function on {0,1}^d given either as a truth table or as a
/// network whose output is thresholded (output >= threshold ↦ 1).
///
/// Inputs are encoded as integers: bit i of the index is component i, so
/// index 0 is the all-zeros input.
class BooleanClassifier {
 public:
  static constexpr std::size_t kMaxTruthTableDim = 20;

  static BooleanClassifier from_truth_table(std::size_t dim, std::vector<std::uint8_t> table);
  static BooleanClassifier from_network(NeuralNetwork net, double threshold = 0.5);

  std::size_t dim() const { return dim_; }
  bool has_truth_table() const { return std::holds_alternative<Table>(impl_); }
  const std::vector<std::uint8_t>& truth_table() const;

  bool evaluate(std::uint32_t input) const;
  /// Truth-table form of this classifier (identity for truth tables).
  BooleanClassifier materialize() const;

 private:
  struct Table {
    std::vector<std::uint8_t> bits;
  };
  struct Thresholded {
    NeuralNetwork net;
    double threshold;
  };

  BooleanClassifier(std::size_t dim, std::variant<Table, Thresholded> impl)
      : dim_(dim), impl_(std::move(impl)) {}

  std::size_t dim_;
  std::variant<Table, Thresholded> impl_;
};

std::uint32_t encode_bits(const BitVector& x);

/// P(Φ(y) = Φ(x) | y_S = x_S) under uniform completion, counted exactly.
/// Throws InstanceTooLarge when more than 24 components are free.
Rational conditional_probability(const BooleanClassifier& phi, const BitVector& x,
                                 const IndexSet& subset);

bool is_delta_relevant(const BooleanClassifier& phi, const BitVector& x, const IndexSet& subset,
                       const Rational& delta);

/// Distortion of a fixed set for {0,1}-valued Φ: (1 - p_S) / 2.
Rational set_distortion(const BooleanClassifier& phi, const BitVector& x, const IndexSet& subset);

struct DiscreteSolution {
  std::size_t min_size = 0;
  IndexSet witness;  // sorted, 0-based
  Rational achieved_probability;
};

/// Smallest δ-relevant set, lexicographically first among those of minimal
/// size. Exhaustive over sizes 0, 1, 2, ...
DiscreteSolution min_relevant_input(const BooleanClassifier& phi, const BitVector& x,
                                    const Rational& delta, std::size_t max_dim = 16);

struct ExactRatePoint {
  double epsilon = 0.0;
  std::size_t rate = 0;
  Rational distortion;  // smallest distortion among sets of size `rate`
  IndexSet witness;
};

/// R(ε) = min{|S| : D(S) ≤ ε} for each ε.
std::vector<ExactRatePoint> exact_rate_distortion(const BooleanClassifier& phi, const BitVector& x,
                                                  const std::vector<double>& epsilons,
                                                  std::size_t max_dim = 16);

}  // namespace rde
