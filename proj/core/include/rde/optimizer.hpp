#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rde/adf.hpp"

namespace rde {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ArmijoConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  std::size_t max_backtracks = 30;
};

struct OptimizerConfig {
  double lambda = 0.5;
  double momentum = 0.85;
  double init_value = 0.2;
  std::size_t max_iters = 200;
  double rel_tol = 1e-6;
  /// Iterations over which the relative objective change is measured.
  std::size_t tol_window = 5;
  ArmijoConfig armijo;
  CovarianceMode mode = CovarianceMode::kDiagonal;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// 0.5 up to 1024 input components, 0.05 above.
double default_lambda(std::size_t input_dim);

enum class Termination { kMaxIters, kRelTol };

struct IterationRecord {
  std::size_t iteration = 0;
  double objective = 0.0;
  double distortion = 0.0;
  double l1 = 0.0;
  double step_size = 0.0;  // 0 when the line search failed
  std::size_t backtracks = 0;
};

struct OptimizerTrace {
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::kMaxIters;
};

struct ObjectiveValue {
  double value = 0.0;
  DistortionReport distortion;
};

/// Componentwise clamp to [0,1].
Vector project_box(const Vector& v);

/// D(s) + λ Σ s_i.
ObjectiveValue objective(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const RelevanceScores& s, double lambda, CovarianceMode mode);

/// Gradient of the objective on [0,1]^d: ∂D/∂s + λ.
Vector gradient(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                const RelevanceScores& s, double lambda, CovarianceMode mode);

struct OptimizerResult {
  RelevanceScores scores;
  ObjectiveValue final_objective;
  OptimizerTrace trace;
};

/// Projected heavy-ball descent with Armijo backtracking, starting from the
/// constant map init_value·1.
///
/// Each iteration tries s' = Π(s + momentum·v - t·g) for t = initial_step,
/// initial_step·shrink, ... and accepts the first t with
///   f(s') ≤ f(s) + c·⟨g, s' - s⟩  and  f(s') ≤ f(s).
/// The velocity v is the accepted displacement s' - s. When no step is
/// accepted the iterate stays, v is reset, and two consecutive failures end
/// the run.
OptimizerResult optimize(const NeuralNetwork& net, const GaussianReference& ref, const Vector& x,
                         const OptimizerConfig& config);

}  // namespace rde
