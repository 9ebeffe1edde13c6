#include "vudetect/loss.hpp"

#include <algorithm>
#include <cmath>

#include "vudetect/error.hpp"

namespace vudetect {

namespace {
void check(std::span<const double> p, std::span<const double> y) {
  if (p.empty()) throw EmptyBatch("empty batch");
  if (p.size() != y.size()) throw ShapeMismatch("probabilities and labels differ in length");
}
}  // namespace

LossValue soft_f1_loss(std::span<const double> p, std::span<const double> y) {
  check(p, y);
  double tp = 0.0;
  double sum_p = 0.0;
  double sum_y = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] * y[i];
    sum_p += p[i];
    sum_y += y[i];
  }
  // 2TP + FP + FN == sum(p) + sum(y)
  const double denom = sum_p + sum_y + kSoftF1Epsilon;
  LossValue out;
  out.loss = 1.0 - 2.0 * tp / denom;
  out.grad.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.grad[i] = -(2.0 * y[i] * denom - 2.0 * tp) / (denom * denom);
  }
  return out;
}

LossValue weighted_bce_loss(std::span<const double> p, std::span<const double> y,
                            double positive_weight) {
  check(p, y);
  constexpr double kClip = 1e-12;
  const double n = static_cast<double>(p.size());
  LossValue out;
  out.grad.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::clamp(p[i], kClip, 1.0 - kClip);
    out.loss -= (positive_weight * y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi)) / n;
    out.grad[i] = (-positive_weight * y[i] / pi + (1.0 - y[i]) / (1.0 - pi)) / n;
  }
  return out;
}

}  // namespace vudetect
