#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace vudetect {

class Rng;

/// One LSTM layer (gate order input, forget, cell, output) whose final hidden
/// state feeds a single sigmoid unit. All parameters live in one flat vector
/// in the order W_x (4H x D), W_h (4H x H), b (4H), dense w (H), dense b.
class SequenceClassifier {
 public:
  using Mat = Eigen::Map<Eigen::MatrixXd>;
  using ConstMat = Eigen::Map<const Eigen::MatrixXd>;
  using Vec = Eigen::Map<Eigen::VectorXd>;
  using ConstVec = Eigen::Map<const Eigen::VectorXd>;

  SequenceClassifier() = default;
  /// All parameters zero.
  SequenceClassifier(std::size_t input_dim, std::size_t hidden);

  /// Glorot-uniform input weights, orthogonal recurrent weights, forget-gate
  /// bias 1, everything else zero except the Glorot-uniform dense weights.
  static SequenceClassifier initialized(std::size_t input_dim, std::size_t hidden, Rng& rng);

  std::size_t input_dim() const { return d_; }
  std::size_t hidden_dim() const { return h_; }
  std::size_t param_count() const { return static_cast<std::size_t>(params_.size()); }
  static std::size_t param_count(std::size_t input_dim, std::size_t hidden);

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Mat w_x() { return Mat(params_.data(), rows(), cols_x()); }
  ConstMat w_x() const { return ConstMat(params_.data(), rows(), cols_x()); }
  Mat w_h() { return Mat(params_.data() + off_h(), rows(), cols_h()); }
  ConstMat w_h() const { return ConstMat(params_.data() + off_h(), rows(), cols_h()); }
  Vec bias() { return Vec(params_.data() + off_b(), rows()); }
  ConstVec bias() const { return ConstVec(params_.data() + off_b(), rows()); }
  Vec dense_w() { return Vec(params_.data() + off_dw(), cols_h()); }
  ConstVec dense_w() const { return ConstVec(params_.data() + off_dw(), cols_h()); }
  double& dense_b() { return params_[static_cast<Eigen::Index>(off_db())]; }
  double dense_b() const { return params_[static_cast<Eigen::Index>(off_db())]; }

  /// Probability for one k x D sequence (k >= 1, else EmptySequence).
  double forward(const Eigen::MatrixXd& sequence) const;

  bool all_finite() const { return params_.allFinite(); }

  friend bool operator==(const SequenceClassifier& a, const SequenceClassifier& b) {
    return a.d_ == b.d_ && a.h_ == b.h_ && a.params_ == b.params_;
  }

 private:
  Eigen::Index rows() const { return static_cast<Eigen::Index>(4 * h_); }
  Eigen::Index cols_x() const { return static_cast<Eigen::Index>(d_); }
  Eigen::Index cols_h() const { return static_cast<Eigen::Index>(h_); }
  std::size_t off_h() const { return 4 * h_ * d_; }
  std::size_t off_b() const { return off_h() + 4 * h_ * h_; }
  std::size_t off_dw() const { return off_b() + 4 * h_; }
  std::size_t off_db() const { return off_dw() + h_; }

  std::size_t d_ = 0;
  std::size_t h_ = 0;
  Eigen::VectorXd params_;
};

struct DropoutRates {
  double input = 0.0;
  double recurrent = 0.0;
};

enum class LossKind { soft_f1, weighted_bce };

struct LossSettings {
  LossKind kind = LossKind::soft_f1;
  double positive_weight = 1.0;  // weighted_bce only
};

struct BatchResult {
  double loss = 0.0;
  std::vector<double> probabilities;
};

using SequenceRefs = std::span<const Eigen::MatrixXd* const>;

/// Inference on sequences of differing lengths. Shorter sequences are padded
/// and masked: padded steps carry the state through unchanged.
std::vector<double> forward_batch(const SequenceClassifier& model, SequenceRefs sequences);

/// Forward pass and backpropagation through time of the batch loss. One
/// input and one recurrent dropout mask per sequence are drawn from `rng`
/// when the rates are positive (inverted scaling). `grad` receives the full
/// parameter gradient.
BatchResult forward_backward(const SequenceClassifier& model, SequenceRefs sequences,
                             std::span<const double> labels, const LossSettings& loss,
                             const DropoutRates& dropout, Rng* rng, Eigen::VectorXd& grad);

/// Batch loss without gradients (used by the finite-difference check).
double batch_loss(const SequenceClassifier& model, SequenceRefs sequences,
                  std::span<const double> labels, const LossSettings& loss);

}  // namespace vudetect
