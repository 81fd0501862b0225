#include "rde/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rde/mc.hpp"
#include "rde/parallel.hpp"
#include "rde/random.hpp"

namespace rde {

std::vector<double> uniform_rates(std::size_t count) {
  if (count < 2) throw DimensionError("need at least two rates");
  std::vector<double> rates(count);
  for (std::size_t i = 0; i < count; ++i) {
    rates[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return rates;
}

std::size_t default_samples(std::size_t input_dim) { return input_dim <= 1024 ? 512 : 64; }

std::vector<std::size_t> ordering_from_scores(std::span<const double> scores, std::uint64_t seed) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // A uniform shuffle followed by a stable sort leaves tied groups in a
  // uniformly random relative order.
  SplitMix64 gen(stream_seed(seed, 0x6f7264));
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::size_t components_at_rate(double rate, std::size_t dim) {
  const double exact = rate * static_cast<double>(dim);
  const auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(k, dim);
}

namespace {

void check_rates(const std::vector<double>& rates) {
  if (rates.empty()) throw DimensionError("no rates given");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) throw DimensionError("rates must lie in [0,1]");
    if (i > 0 && !(rates[i] > rates[i - 1])) {
      throw DimensionError("rates must be strictly increasing");
    }
  }
}

void check_ordering(std::span<const std::size_t> ordering, std::size_t dim) {
  if (ordering.size() != dim) throw DimensionError("ordering length does not match input dimension");
  std::vector<bool> seen(dim, false);
  for (std::size_t i : ordering) {
    if (i >= dim || seen[i]) throw DimensionError("ordering is not a permutation");
    seen[i] = true;
  }
}

// summands[r][j] = ½(Φ(x) - Φ(y_j at rate r))².
std::vector<std::vector<double>> ordering_summands(const NeuralNetwork& net,
                                                   const GaussianReference& ref, const Vector& x,
                                                   std::span<const std::size_t> ordering,
                                                   const OrderingOptions& options) {
  const std::size_t d = net.input_dim();
  if (static_cast<std::size_t>(x.size()) != d || ref.dim() != d) {
    throw DimensionError("evaluate_ordering: dimension mismatch");
  }
  check_ordering(ordering, d);
  check_rates(options.rates);
  if (options.samples < 2) throw DimensionError("need at least 2 samples per point");

  const double reference_output = forward(net, x);
  std::vector<std::vector<double>> summands(options.rates.size(),
                                            std::vector<double>(options.samples));
  for (std::size_t j = 0; j < options.samples; ++j) {
    Vector y = draw_reference_noise(ref, options.seed, j);
    if (options.clamp) y = y.cwiseMax(0.0).cwiseMin(1.0);
    std::size_t fixed = 0;
    for (std::size_t r = 0; r < options.rates.size(); ++r) {
      const std::size_t target = components_at_rate(options.rates[r], d);
      for (; fixed < target; ++fixed) {
        const auto idx = static_cast<Eigen::Index>(ordering[fixed]);
        y(idx) = x(idx);
      }
      const double gap = reference_output - forward(net, y);
      summands[r][j] = 0.5 * gap * gap;
    }
  }
  return summands;
}

RateDistortionCurve curve_from_summands(const std::vector<double>& rates,
                                        const std::vector<std::vector<double>>& summands,
                                        std::size_t images) {
  RateDistortionCurve curve;
  curve.samples_per_point = summands.front().size();
  curve.images_averaged = images;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    const McEstimate est = mean_and_standard_error(summands[r]);
    curve.points.push_back(CurvePoint{rates[r], est.estimate, est.standard_error});
  }
  return curve;
}

}  // namespace

RateDistortionCurve evaluate_ordering(const NeuralNetwork& net, const GaussianReference& ref,
                                      const Vector& x, std::span<const std::size_t> ordering,
                                      const OrderingOptions& options) {
  return curve_from_summands(options.rates, ordering_summands(net, ref, x, ordering, options), 1);
}

RateDistortionCurve evaluate_batch(const NeuralNetwork& net, const GaussianReference& ref,
                                   const std::vector<Vector>& images,
                                   const std::vector<Vector>& maps, const OrderingOptions& options,
                                   std::size_t threads) {
  if (images.empty()) throw DimensionError("evaluate_batch: no images");
  if (images.size() != maps.size()) {
    throw DimensionError("evaluate_batch: " + std::to_string(images.size()) + " images but " +
                         std::to_string(maps.size()) + " relevance maps");
  }
  std::vector<std::vector<std::vector<double>>> per_image(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const Vector& map = maps[i];
    // Ties are broken independently per image; the noise draws stay shared.
    const std::uint64_t tie_seed = i == 0 ? options.seed : stream_seed(options.seed, i);
    const auto order = ordering_from_scores(std::span<const double>(map.data(), map.size()),
                                            tie_seed);
    per_image[i] = ordering_summands(net, ref, images[i], order, options);
  });

  // Average over images sample by sample, in image order.
  std::vector<std::vector<double>> averaged = per_image.front();
  for (std::size_t i = 1; i < per_image.size(); ++i) {
    for (std::size_t r = 0; r < averaged.size(); ++r) {
      for (std::size_t j = 0; j < averaged[r].size(); ++j) averaged[r][j] += per_image[i][r][j];
    }
  }
  const auto count = static_cast<double>(images.size());
  if (images.size() > 1) {
    for (auto& row : averaged) {
      for (double& v : row) v /= count;
    }
  }
  return curve_from_summands(options.rates, averaged, images.size());
}

double trapezoid_auc(const RateDistortionCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const CurvePoint& a = curve.points[i - 1];
    const CurvePoint& b = curve.points[i];
    area += 0.5 * (b.rate - a.rate) * (a.distortion + b.distortion);
  }
  return area;
}

}  // namespace rde
