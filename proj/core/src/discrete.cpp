#include "rde/discrete.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>

namespace rde {

// -- Rational ----------------------------------------------------------------

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("rational with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = g == 0 ? 0 : numerator / g;
  den_ = g == 0 ? 1 : denominator / g;
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view fraction = text.substr(dot + 1);
    if (fraction.size() > 17) throw std::invalid_argument("too many decimals in '" + std::string(text) + "'");
    const bool negative = !text.empty() && text.front() == '-';
    std::string_view integral = text.substr(0, dot);
    if (negative || (!integral.empty() && integral.front() == '+')) integral.remove_prefix(1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < fraction.size(); ++i) scale *= 10;
    const std::int64_t whole = integral.empty() ? 0 : parse_int(integral, text);
    const std::int64_t frac = fraction.empty() ? 0 : parse_int(fraction, text);
    const std::int64_t magnitude = whole * scale + frac;
    return Rational(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text, text));
}

std::string Rational::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

__extension__ using WideInt = __int128;

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const WideInt lhs = static_cast<WideInt>(a.numerator()) * b.denominator();
  const WideInt rhs = static_cast<WideInt>(b.numerator()) * a.denominator();
  return lhs <=> rhs;
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.numerator() * b.denominator() - b.numerator() * a.denominator(),
                  a.denominator() * b.denominator());
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.numerator() * b.numerator(), a.denominator() * b.denominator());
}

// -- BooleanClassifier -------------------------------------------------------

BooleanClassifier BooleanClassifier::from_truth_table(std::size_t dim,
                                                      std::vector<std::uint8_t> table) {
  if (dim == 0 || dim > kMaxTruthTableDim) {
    throw std::invalid_argument("truth table dimension must lie in [1, 20], got " +
                                std::to_string(dim));
  }
  if (table.size() != (std::size_t{1} << dim)) {
    throw std::invalid_argument("truth table has " + std::to_string(table.size()) +
                                " entries, expected " + std::to_string(std::size_t{1} << dim));
  }
  for (std::uint8_t bit : table) {
    if (bit > 1) throw std::invalid_argument("truth table entries must be 0 or 1");
  }
  return BooleanClassifier(dim, Table{std::move(table)});
}

BooleanClassifier BooleanClassifier::from_network(NeuralNetwork net, double threshold) {
  const std::size_t dim = net.input_dim();
  if (dim > 31) throw InstanceTooLarge("thresholded network input too wide for bit encoding");
  return BooleanClassifier(dim, Thresholded{std::move(net), threshold});
}

const std::vector<std::uint8_t>& BooleanClassifier::truth_table() const {
  return std::get<Table>(impl_).bits;
}

bool BooleanClassifier::evaluate(std::uint32_t input) const {
  if (const auto* table = std::get_if<Table>(&impl_)) return table->bits[input] != 0;
  const auto& th = std::get<Thresholded>(impl_);
  Vector x(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) x(static_cast<Eigen::Index>(i)) = (input >> i) & 1U;
  return forward(th.net, x) >= th.threshold;
}

BooleanClassifier BooleanClassifier::materialize() const {
  if (has_truth_table()) return *this;
  if (dim_ > kMaxTruthTableDim) throw InstanceTooLarge("network too wide to materialize");
  std::vector<std::uint8_t> bits(std::size_t{1} << dim_);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = evaluate(static_cast<std::uint32_t>(i)) ? 1 : 0;
  }
  return BooleanClassifier(dim_, Table{std::move(bits)});
}

std::uint32_t encode_bits(const BitVector& x) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("bit vector entries must be 0 or 1");
    if (x[i]) mask |= 1U << i;
  }
  return mask;
}

// -- relevance queries -------------------------------------------------------

namespace {

constexpr std::size_t kMaxFreeBits = 24;

std::uint32_t subset_mask(const IndexSet& subset, std::size_t dim) {
  std::uint32_t mask = 0;
  for (std::size_t i : subset) {
    if (i >= dim) {
      throw std::invalid_argument("index " + std::to_string(i) + " out of range for d = " +
                                  std::to_string(dim));
    }
    mask |= 1U << i;
  }
  return mask;
}

void check_input(const BooleanClassifier& phi, const BitVector& x) {
  if (x.size() != phi.dim()) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " bits, expected " +
                                std::to_string(phi.dim()));
  }
}

// Number of completions agreeing with Φ(x), out of 2^{free bits}.
Rational agreement(const BooleanClassifier& phi, std::uint32_t x, std::uint32_t fixed) {
  const std::uint32_t all = phi.dim() == 32 ? ~0U : ((1U << phi.dim()) - 1U);
  const std::uint32_t free = all & ~fixed;
  const auto free_count = static_cast<std::size_t>(std::popcount(free));
  if (free_count > kMaxFreeBits) {
    throw InstanceTooLarge("instance too large: " + std::to_string(free_count) +
                           " free components exceed the enumeration limit of 24");
  }
  const bool target = phi.evaluate(x);
  const std::uint32_t base = x & fixed;
  std::int64_t hits = 0;
  std::uint32_t sub = free;
  while (true) {
    if (phi.evaluate(base | sub) == target) ++hits;
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
  return Rational(hits, std::int64_t{1} << free_count);
}

// Visits all size-k subsets of [d] in lexicographic order until fn returns true.
template <typename Fn>
bool for_each_combination(std::size_t d, std::size_t k, Fn&& fn) {
  IndexSet idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    if (fn(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == d - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

BooleanClassifier fast_form(const BooleanClassifier& phi) {
  return phi.dim() <= BooleanClassifier::kMaxTruthTableDim ? phi.materialize() : phi;
}

}  // namespace

Rational conditional_probability(const BooleanClassifier& phi, const BitVector& x,
                                 const IndexSet& subset) {
  check_input(phi, x);
  return agreement(phi, encode_bits(x), subset_mask(subset, phi.dim()));
}

bool is_delta_relevant(const BooleanClassifier& phi, const BitVector& x, const IndexSet& subset,
                       const Rational& delta) {
  return conditional_probability(phi, x, subset) >= delta;
}

Rational set_distortion(const BooleanClassifier& phi, const BitVector& x, const IndexSet& subset) {
  return (Rational(1) - conditional_probability(phi, x, subset)) * Rational(1, 2);
}

DiscreteSolution min_relevant_input(const BooleanClassifier& phi, const BitVector& x,
                                    const Rational& delta, std::size_t max_dim) {
  check_input(phi, x);
  const std::size_t d = phi.dim();
  if (d > max_dim) {
    throw InstanceTooLarge("instance too large: d = " + std::to_string(d) + " exceeds max_d = " +
                           std::to_string(max_dim));
  }
  const BooleanClassifier table = fast_form(phi);
  const std::uint32_t xm = encode_bits(x);
  DiscreteSolution solution;
  for (std::size_t k = 0; k <= d; ++k) {
    const bool found = for_each_combination(d, k, [&](const IndexSet& set) {
      const Rational p = agreement(table, xm, subset_mask(set, d));
      if (p >= delta) {
        solution.min_size = k;
        solution.witness = set;
        solution.achieved_probability = p;
        return true;
      }
      return false;
    });
    if (found) return solution;
  }
  // Only reachable for δ > 1: the full set has probability exactly 1.
  throw std::invalid_argument("no delta-relevant set exists for delta = " + delta.to_string());
}

std::vector<ExactRatePoint> exact_rate_distortion(const BooleanClassifier& phi, const BitVector& x,
                                                  const std::vector<double>& epsilons,
                                                  std::size_t max_dim) {
  check_input(phi, x);
  const std::size_t d = phi.dim();
  if (d > max_dim) {
    throw InstanceTooLarge("instance too large: d = " + std::to_string(d) + " exceeds max_d = " +
                           std::to_string(max_dim));
  }
  const BooleanClassifier table = fast_form(phi);
  const std::uint32_t xm = encode_bits(x);

  // Best (smallest) distortion per set size, lexicographically first witness.
  std::vector<Rational> best(d + 1, Rational(1));
  std::vector<IndexSet> witness(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    bool first = true;
    for_each_combination(d, k, [&](const IndexSet& set) {
      const Rational p = agreement(table, xm, subset_mask(set, d));
      const Rational dist = (Rational(1) - p) * Rational(1, 2);
      if (first || dist < best[k]) {
        best[k] = dist;
        witness[k] = set;
        first = false;
      }
      return false;
    });
  }

  std::vector<ExactRatePoint> curve;
  curve.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    ExactRatePoint point;
    point.epsilon = eps;
    for (std::size_t k = 0; k <= d; ++k) {
      // dist ≤ ε  ⇔  num ≤ ε·den, evaluated in extended precision.
      const auto lhs = static_cast<long double>(best[k].numerator());
      const long double rhs = static_cast<long double>(eps) * best[k].denominator();
      if (lhs <= rhs) {
        point.rate = k;
        point.distortion = best[k];
        point.witness = witness[k];
        break;
      }
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace rde
