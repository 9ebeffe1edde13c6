#include "vudetect/optimizer.hpp"

#include <cmath>
#include <string>

#include "vudetect/error.hpp"

namespace vudetect {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adagrad: return "adagrad";
    case OptimizerKind::adamax: return "adamax";
    case OptimizerKind::nadam: return "nadam";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::sgd: return "sgd";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
  for (auto k : {OptimizerKind::adam, OptimizerKind::adagrad, OptimizerKind::adamax,
                 OptimizerKind::nadam, OptimizerKind::rmsprop, OptimizerKind::sgd}) {
    if (to_string(k) == name) return k;
  }
  throw UnknownOptimizer("unknown optimizer: " + std::string(name));
}

double default_learning_rate(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adam: return 0.001;
    case OptimizerKind::adagrad: return 0.01;
    case OptimizerKind::adamax: return 0.002;
    case OptimizerKind::nadam: return 0.002;
    case OptimizerKind::rmsprop: return 0.001;
    case OptimizerKind::sgd: return 0.01;
  }
  return 0.001;
}

void optimizer_step(const OptimizerSettings& s, Eigen::VectorXd& params,
                    const Eigen::VectorXd& grad, OptimizerState& state) {
  if (grad.size() != params.size()) throw ShapeMismatch("gradient and parameter sizes differ");
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.t = 0;
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double lr = s.learning_rate;
  const double eps = s.epsilon;
  switch (s.kind) {
    case OptimizerKind::sgd:
      params -= lr * grad;
      break;
    case OptimizerKind::adagrad:
      state.v += grad.cwiseAbs2();
      params.array() -= lr * grad.array() / (state.v.array().sqrt() + eps);
      break;
    case OptimizerKind::rmsprop:
      state.v = s.rho * state.v + (1.0 - s.rho) * grad.cwiseAbs2();
      params.array() -= lr * grad.array() / (state.v.array().sqrt() + eps);
      break;
    case OptimizerKind::adam: {
      state.m = s.beta1 * state.m + (1.0 - s.beta1) * grad;
      state.v = s.beta2 * state.v + (1.0 - s.beta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(s.beta1, t);
      const double c2 = 1.0 - std::pow(s.beta2, t);
      params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + eps);
      break;
    }
    case OptimizerKind::adamax: {
      state.m = s.beta1 * state.m + (1.0 - s.beta1) * grad;
      state.v = (s.beta2 * state.v).cwiseMax(grad.cwiseAbs());
      const double c1 = 1.0 - std::pow(s.beta1, t);
      params.array() -= (lr / c1) * state.m.array() / (state.v.array() + eps);
      break;
    }
    case OptimizerKind::nadam: {
      state.m = s.beta1 * state.m + (1.0 - s.beta1) * grad;
      state.v = s.beta2 * state.v + (1.0 - s.beta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(s.beta1, t);
      const double c1_next = 1.0 - std::pow(s.beta1, t + 1.0);
      const double c2 = 1.0 - std::pow(s.beta2, t);
      const Eigen::ArrayXd m_bar =
          s.beta1 * state.m.array() / c1_next + (1.0 - s.beta1) * grad.array() / c1;
      params.array() -= lr * m_bar / ((state.v.array() / c2).sqrt() + eps);
      break;
    }
  }
}

}  // namespace vudetect
