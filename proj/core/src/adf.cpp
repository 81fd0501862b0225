#include "rde/adf.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace rde {

double std_normal_pdf(double t) {
  return std::exp(-0.5 * t * t) * (0.5 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi));
}

double std_normal_cdf(double t) {
  const double value = 0.5 * std::erfc(-t / std::numbers::sqrt2);
  return value < 1e-300 ? 0.0 : value;
}

namespace {

void check_affine(const MomentState& state, const AffineLayer& layer) {
  if (state.dim() != layer.input_width()) {
    throw DimensionError("propagate_affine: state width " + std::to_string(state.dim()) +
                         " vs layer input width " + std::to_string(layer.input_width()));
  }
}

// Per-component quantities of one ReLU step, kept for the backward pass.
struct ReluTape {
  Vector mean_in;
  Vector sigma;
  Vector pdf;
  Vector cdf;
  Vector mean_out;
  Matrix factor_in;  // low-rank mode only
  std::vector<bool> deterministic;
};

MomentState relu_forward(const MomentState& state, ReluTape* tape) {
  const Eigen::Index n = state.mean.size();
  const Vector sigma = state.stddev();
  MomentState out;
  out.mode = state.mode;
  out.mean.resize(n);
  if (state.mode == CovarianceMode::kDiagonal) {
    out.variance.resize(n);
  } else {
    out.factor = state.factor;
  }
  if (tape) {
    tape->mean_in = state.mean;
    tape->sigma = sigma;
    tape->pdf = Vector::Zero(n);
    tape->cdf = Vector::Zero(n);
    tape->deterministic.assign(static_cast<std::size_t>(n), false);
    if (state.mode == CovarianceMode::kLowRank) tape->factor_in = state.factor;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = state.mean(i);
    const double sd = sigma(i);
    if (sd < kDeterministicStddev) {
      out.mean(i) = std::max(mu, 0.0);
      const bool pass = mu >= 0.0;
      if (state.mode == CovarianceMode::kDiagonal) {
        out.variance(i) = pass ? std::max(state.variance(i), 0.0) : 0.0;
      } else if (!pass) {
        out.factor.row(i).setZero();
      }
      if (tape) tape->deterministic[static_cast<std::size_t>(i)] = true;
      continue;
    }
    const double eta = mu / sd;
    const double f = std_normal_pdf(eta);
    const double cdf = std_normal_cdf(eta);
    const double mean = sd * f + mu * cdf;
    out.mean(i) = mean;
    if (state.mode == CovarianceMode::kDiagonal) {
      const double second = mu * sd * f + (sd * sd + mu * mu) * cdf;
      out.variance(i) = std::max(second - mean * mean, 0.0);
    } else {
      out.factor.row(i) *= cdf;
    }
    if (tape) {
      tape->pdf(i) = f;
      tape->cdf(i) = cdf;
    }
  }
  if (tape) tape->mean_out = out.mean;
  return out;
}

}  // namespace

MomentState propagate_affine(const MomentState& state, const AffineLayer& layer) {
  check_affine(state, layer);
  MomentState out;
  out.mode = state.mode;
  out.mean = layer.weights * state.mean + layer.bias;
  if (state.mode == CovarianceMode::kDiagonal) {
    out.variance = layer.weights.cwiseAbs2() * state.variance;
  } else {
    out.factor = layer.weights * state.factor;
  }
  return out;
}

MomentState propagate_relu(const MomentState& state) { return relu_forward(state, nullptr); }

MomentState propagate_network(const NeuralNetwork& net, MomentState state) {
  for (const AffineLayer& layer : net.layers()) {
    state = propagate_affine(state, layer);
    if (layer.activation == Activation::kRelu) state = propagate_relu(state);
  }
  return state;
}

namespace {

// Restricts the final layer to the selected output row.
AffineLayer output_row(const NeuralNetwork& net) {
  const AffineLayer& last = net.layers().back();
  const auto row = static_cast<Eigen::Index>(net.output_index());
  AffineLayer out;
  out.weights = last.weights.row(row);
  out.bias = last.bias.segment(row, 1);
  out.activation = Activation::kIdentity;
  return out;
}

DistortionReport make_report(double reference_output, const MomentState& out) {
  DistortionReport report;
  report.reference_output = reference_output;
  report.output_mean = out.mean(0);
  report.output_variance = out.mode == CovarianceMode::kDiagonal
                               ? std::max(out.variance(0), 0.0)
                               : out.factor.row(0).squaredNorm();
  const double gap = reference_output - report.output_mean;
  report.bias_term = 0.5 * gap * gap;
  report.variance_term = 0.5 * report.output_variance;
  report.total = report.bias_term + report.variance_term;
  return report;
}

struct ForwardTape {
  std::vector<const AffineLayer*> affine;
  std::vector<ReluTape> relu;  // one per affine layer; unused when identity
  MomentState output;
};

ForwardTape run_forward(const NeuralNetwork& net, const AffineLayer& last, MomentState state,
                        bool record) {
  ForwardTape tape;
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const AffineLayer& layer = i + 1 == layers.size() ? last : layers[i];
    tape.affine.push_back(&layer);
    state = propagate_affine(state, layer);
    tape.relu.emplace_back();
    if (layer.activation == Activation::kRelu) {
      state = relu_forward(state, record ? &tape.relu.back() : nullptr);
    }
  }
  tape.output = std::move(state);
  return tape;
}

}  // namespace

DistortionReport adf_distortion(const NeuralNetwork& net, const GaussianReference& ref,
                                const Vector& x, const RelevanceScores& s, CovarianceMode mode) {
  const double reference_output = forward(net, x);
  const AffineLayer last = output_row(net);
  ForwardTape tape = run_forward(net, last, input_moments(ref, x, s, mode), false);
  return make_report(reference_output, tape.output);
}

DistortionGradient adf_distortion_gradient(const NeuralNetwork& net, const GaussianReference& ref,
                                           const Vector& x, const RelevanceScores& s,
                                           CovarianceMode mode) {
  const double reference_output = forward(net, x);
  const AffineLayer last = output_row(net);
  const MomentState input = input_moments(ref, x, s, mode);
  ForwardTape tape = run_forward(net, last, input, true);

  DistortionGradient result;
  result.report = make_report(reference_output, tape.output);

  const bool diagonal = mode == CovarianceMode::kDiagonal;
  // Adjoints of the output moments.
  Vector d_mean(1);
  d_mean(0) = result.report.output_mean - reference_output;
  Vector d_var;
  Matrix d_factor;
  if (diagonal) {
    d_var = Vector::Constant(1, 0.5);
  } else {
    d_factor = tape.output.factor;  // ∂(½‖q‖²)/∂q
  }

  for (std::size_t k = tape.affine.size(); k-- > 0;) {
    const AffineLayer& layer = *tape.affine[k];
    if (layer.activation == Activation::kRelu) {
      const ReluTape& rt = tape.relu[k];
      const Eigen::Index n = rt.mean_in.size();
      Vector dm_in(n);
      if (diagonal) {
        Vector dv_in(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double mu = rt.mean_in(i);
          if (rt.deterministic[static_cast<std::size_t>(i)]) {
            dm_in(i) = mu > 0.0 ? d_mean(i) : 0.0;
            dv_in(i) = mu >= 0.0 ? d_var(i) : 0.0;
            continue;
          }
          const double sd = rt.sigma(i);
          const double f = rt.pdf(i);
          const double cdf = rt.cdf(i);
          const double mean = rt.mean_out(i);
          // ∂mean/∂μ = F, ∂mean/∂σ = f, ∂var/∂μ = 2·mean·(1-F), ∂var/∂σ = 2σF - 2·mean·f
          dm_in(i) = d_mean(i) * cdf + d_var(i) * 2.0 * mean * (1.0 - cdf);
          const double d_sd = d_mean(i) * f + d_var(i) * (2.0 * sd * cdf - 2.0 * mean * f);
          dv_in(i) = d_sd / (2.0 * sd);
        }
        d_var = std::move(dv_in);
      } else {
        Matrix d_in = d_factor;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double mu = rt.mean_in(i);
          if (rt.deterministic[static_cast<std::size_t>(i)]) {
            dm_in(i) = mu > 0.0 ? d_mean(i) : 0.0;
            if (!(mu >= 0.0)) d_in.row(i).setZero();
            continue;
          }
          // out_row = F(η)·in_row with σ = ‖in_row‖ and η = μ/σ.
          const double sd = rt.sigma(i);
          const double f = rt.pdf(i);
          const double cdf = rt.cdf(i);
          const double eta = mu / sd;
          const double a = d_factor.row(i).dot(rt.factor_in.row(i));
          const double d_sd = d_mean(i) * f - a * f * eta / sd;
          d_in.row(i) = cdf * d_factor.row(i) + (d_sd / sd) * rt.factor_in.row(i);
          dm_in(i) = d_mean(i) * cdf + a * f / sd;
        }
        d_factor = std::move(d_in);
      }
      d_mean = std::move(dm_in);
    }
    // Affine step.
    d_mean = layer.weights.transpose() * d_mean;
    if (diagonal) {
      d_var = layer.weights.cwiseAbs2().transpose() * d_var;
    } else {
      d_factor = layer.weights.transpose() * d_factor;
    }
  }

  const Vector& sv = s.values();
  const Eigen::Index d = sv.size();
  result.gradient = d_mean.cwiseProduct(x - ref.mean());
  if (diagonal) {
    const Vector var = ref.variances();
    for (Eigen::Index i = 0; i < d; ++i) {
      result.gradient(i) += d_var(i) * (-2.0 * (1.0 - sv(i)) * var(i));
    }
  } else {
    const Matrix q = ref.factor();
    result.gradient -= d_factor.cwiseProduct(q).rowwise().sum();
  }
  return result;
}

}  // namespace rde
