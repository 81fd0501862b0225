#include "rde/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace rde {

void OptimizerConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0,1)");
  if (!(init_value >= 0.0 && init_value <= 1.0)) throw ConfigError("init_value must lie in [0,1]");
  if (max_iters == 0) throw ConfigError("max_iters must be positive");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
  if (tol_window == 0) throw ConfigError("tol_window must be positive");
  if (!(armijo.initial_step > 0.0)) throw ConfigError("armijo.initial_step must be positive");
  if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) {
    throw ConfigError("armijo.shrink must lie in (0,1)");
  }
  if (!(armijo.sufficient_decrease > 0.0 && armijo.sufficient_decrease < 1.0)) {
    throw ConfigError("armijo.sufficient_decrease must lie in (0,1)");
  }
}

double default_lambda(std::size_t input_dim) { return input_dim <= 1024 ? 0.5 : 0.05; }

Vector project_box(const Vector& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

ObjectiveValue objective(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const RelevanceScores& s, double lambda, CovarianceMode mode) {
  ObjectiveValue out;
  out.distortion = adf_distortion(net, ref, x, s, mode);
  out.value = out.distortion.total + lambda * s.values().sum();
  return out;
}

Vector gradient(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                const RelevanceScores& s, double lambda, CovarianceMode mode) {
  Vector g = adf_distortion_gradient(net, ref, x, s, mode).gradient;
  g.array() += lambda;
  return g;
}

OptimizerResult optimize(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const OptimizerConfig& config) {
  config.validate();
  const std::size_t d = net.input_dim();
  const double lambda = config.lambda;

  Vector s = Vector::Constant(static_cast<Eigen::Index>(d), config.init_value);
  Vector velocity = Vector::Zero(static_cast<Eigen::Index>(d));

  auto evaluate_with_gradient = [&](const Vector& at, ObjectiveValue& value, Vector& grad) {
    DistortionGradient dg = adf_distortion_gradient(net, ref, x, RelevanceScores(at), config.mode);
    value.distortion = dg.report;
    value.value = dg.report.total + lambda * at.sum();
    grad = std::move(dg.gradient);
    grad.array() += lambda;
  };

  ObjectiveValue current;
  Vector grad;
  evaluate_with_gradient(s, current, grad);

  OptimizerTrace trace;
  std::vector<double> history{current.value};
  std::size_t consecutive_failures = 0;
  Termination termination = Termination::kMaxIters;

  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    double step = config.armijo.initial_step;
    bool accepted = false;
    std::size_t backtracks = 0;
    Vector candidate;
    ObjectiveValue trial;
    for (;; ++backtracks) {
      candidate = project_box(s + config.momentum * velocity - step * grad);
      trial = objective(net, ref, x, RelevanceScores(candidate), lambda, config.mode);
      const double predicted = grad.dot(candidate - s);
      if (trial.value <= current.value + config.armijo.sufficient_decrease * predicted &&
          trial.value <= current.value) {
        accepted = true;
        break;
      }
      if (backtracks == config.armijo.max_backtracks) break;
      step *= config.armijo.shrink;
    }

    IterationRecord record;
    record.iteration = it;
    record.backtracks = backtracks;
    if (accepted) {
      consecutive_failures = 0;
      velocity = candidate - s;
      s = std::move(candidate);
      evaluate_with_gradient(s, current, grad);
      record.step_size = step;
    } else {
      velocity.setZero();
      ++consecutive_failures;
    }
    record.objective = current.value;
    record.distortion = current.distortion.total;
    record.l1 = s.sum();
    trace.iterations.push_back(record);
    history.push_back(current.value);

    if (consecutive_failures >= 2) {
      termination = Termination::kMaxIters;
      break;
    }
    if (accepted && history.size() > config.tol_window) {
      const double before = history[history.size() - 1 - config.tol_window];
      const double change = std::abs(before - current.value);
      if (change <= config.rel_tol * std::max(std::abs(current.value), 1e-300)) {
        termination = Termination::kRelTol;
        break;
      }
    }
  }
  trace.termination = termination;
  return OptimizerResult{RelevanceScores(s), current, std::move(trace)};
}

}  // namespace rde
