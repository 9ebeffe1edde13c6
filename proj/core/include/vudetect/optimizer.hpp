#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string_view>

namespace vudetect {

enum class OptimizerKind { adam, adagrad, adamax, nadam, rmsprop, sgd };

std::string_view to_string(OptimizerKind kind);
/// Throws UnknownOptimizer.
OptimizerKind parse_optimizer(std::string_view name);
/// Conventional default step size per algorithm (Adam: 0.001).
double default_learning_rate(OptimizerKind kind);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.9;  // RMSprop decay
  double epsilon = 1e-8;
};

struct OptimizerState {
  Eigen::VectorXd m;  // first moment / accumulator
  Eigen::VectorXd v;  // second moment / infinity norm
  std::uint64_t t = 0;
};

/// One update of `params` in place. `state` is lazily sized on first use.
void optimizer_step(const OptimizerSettings& s, Eigen::VectorXd& params,
                    const Eigen::VectorXd& grad, OptimizerState& state);

}  // namespace vudetect
