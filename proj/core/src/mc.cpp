#include "rde/mc.hpp"

#include <cmath>
#include <vector>

#include "rde/parallel.hpp"

namespace rde {

namespace {

class KahanSum {
 public:
  void add(double v) {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

McEstimate mean_and_standard_error(std::span<const double> values) {
  if (values.size() < 2) throw DimensionError("need at least 2 values for a standard error");
  const auto n = static_cast<double>(values.size());
  KahanSum sum;
  for (double v : values) sum.add(v);
  const double mean = sum.value() / n;
  KahanSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  const double variance = squares.value() / (n - 1.0);
  return McEstimate{mean, std::sqrt(variance / n)};
}

McEstimate mc_distortion(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const RelevanceScores& s, std::size_t count, std::uint64_t seed,
                         std::size_t threads) {
  if (count < 2) throw DimensionError("mc_distortion: count must be >= 2");
  if (static_cast<std::size_t>(x.size()) != net.input_dim() || ref.dim() != net.input_dim() ||
      s.dim() != net.input_dim()) {
    throw DimensionError("mc_distortion: dimension mismatch");
  }
  const double reference_output = forward(net, x);
  std::vector<double> summands(count);
  parallel_for(count, threads, [&](std::size_t j) {
    const Vector y = obfuscate(x, s, draw_reference_noise(ref, seed, j));
    const double gap = reference_output - forward(net, y);
    summands[j] = 0.5 * gap * gap;
  });
  return mean_and_standard_error(summands);
}

}  // namespace rde
