#pragma once

#include <span>
#include <vector>

namespace vudetect {

inline constexpr double kSoftF1Epsilon = 1e-7;

struct LossValue {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d probability
};

/// 1 - 2*TP/(2*TP + FP + FN + eps) with probability-weighted counts
/// TP = sum p*y, FP = sum p*(1-y), FN = sum (1-p)*y. Throws EmptyBatch.
LossValue soft_f1_loss(std::span<const double> probabilities, std::span<const double> labels);

/// Mean binary cross-entropy with positives weighted by `positive_weight`.
LossValue weighted_bce_loss(std::span<const double> probabilities, std::span<const double> labels,
                            double positive_weight = 1.0);

}  // namespace vudetect
