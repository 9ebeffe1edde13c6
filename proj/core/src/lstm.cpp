#include "vudetect/lstm.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "vudetect/error.hpp"
#include "vudetect/loss.hpp"
#include "vudetect/random.hpp"

namespace vudetect {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

SequenceClassifier::SequenceClassifier(std::size_t input_dim, std::size_t hidden)
    : d_(input_dim), h_(hidden) {
  if (input_dim == 0 || hidden == 0) throw ShapeMismatch("classifier dims must be positive");
  params_ = VectorXd::Zero(static_cast<Index>(param_count(input_dim, hidden)));
}

std::size_t SequenceClassifier::param_count(std::size_t d, std::size_t h) {
  return 4 * h * d + 4 * h * h + 4 * h + h + 1;
}

SequenceClassifier SequenceClassifier::initialized(std::size_t input_dim, std::size_t hidden,
                                                   Rng& rng) {
  SequenceClassifier m(input_dim, hidden);
  const auto H = static_cast<Index>(hidden);
  const double limit_x = std::sqrt(6.0 / static_cast<double>(input_dim + 4 * hidden));
  auto wx = m.w_x();
  for (Index c = 0; c < wx.cols(); ++c) {
    for (Index r = 0; r < wx.rows(); ++r) wx(r, c) = rng.uniform(-limit_x, limit_x);
  }
  MatrixXd gauss(4 * H, H);
  for (Index c = 0; c < gauss.cols(); ++c) {
    for (Index r = 0; r < gauss.rows(); ++r) gauss(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<MatrixXd> qr(gauss);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(4 * H, H);
  const MatrixXd r = qr.matrixQR().topRows(H).triangularView<Eigen::Upper>();
  for (Index c = 0; c < H; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  m.w_h() = q;
  m.bias().segment(H, H).setOnes();
  const double limit_d = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  auto dw = m.dense_w();
  for (Index i = 0; i < dw.size(); ++i) dw[i] = rng.uniform(-limit_d, limit_d);
  return m;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Everything the backward pass needs from the forward pass.
struct Tape {
  Index steps = 0;
  Index batch = 0;
  std::vector<Index> lengths;
  MatrixXd xin;    // D x (T*B): dropped-out inputs, zero when padded
  MatrixXd gates;  // 4H x (T*B): activated i, f, g, o
  MatrixXd cells;  // H x ((T+1)*B): cell state before step t at block t
  MatrixXd hin;    // H x (T*B): masked previous hidden state fed to step t
  MatrixXd h_final;
  MatrixXd rec_mask;  // H x B
  std::vector<double> probabilities;
};

MatrixXd dropout_mask(Index rows, Index cols, double rate, Rng* rng) {
  MatrixXd mask = MatrixXd::Ones(rows, cols);
  if (rate <= 0.0 || rng == nullptr) return mask;
  const double keep = 1.0 - rate;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) mask(r, c) = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
  }
  return mask;
}

void run_forward(const SequenceClassifier& model, SequenceRefs seqs, const DropoutRates& dropout,
                 Rng* rng, Tape& tape) {
  const auto D = static_cast<Index>(model.input_dim());
  const auto H = static_cast<Index>(model.hidden_dim());
  const auto B = static_cast<Index>(seqs.size());
  if (B == 0) throw EmptyBatch("empty batch");
  Index T = 0;
  tape.lengths.resize(seqs.size());
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    const MatrixXd& s = *seqs[b];
    if (s.rows() == 0) throw EmptySequence("sequence has no steps");
    if (s.cols() != D) throw ShapeMismatch("sequence width differs from the model input dim");
    tape.lengths[b] = s.rows();
    T = std::max(T, s.rows());
  }
  tape.steps = T;
  tape.batch = B;

  // Masks are drawn per sequence: first the input mask, then the recurrent one.
  MatrixXd in_mask = MatrixXd::Ones(D, B);
  tape.rec_mask = MatrixXd::Ones(H, B);
  if (rng != nullptr && (dropout.input > 0.0 || dropout.recurrent > 0.0)) {
    for (Index b = 0; b < B; ++b) {
      in_mask.col(b) = dropout_mask(D, 1, dropout.input, rng);
      tape.rec_mask.col(b) = dropout_mask(H, 1, dropout.recurrent, rng);
    }
  }

  tape.xin = MatrixXd::Zero(D, T * B);
  for (Index b = 0; b < B; ++b) {
    const MatrixXd& s = *seqs[static_cast<std::size_t>(b)];
    for (Index t = 0; t < s.rows(); ++t) {
      tape.xin.col(t * B + b) = s.row(t).transpose().cwiseProduct(in_mask.col(b));
    }
  }

  tape.gates.noalias() = model.w_x() * tape.xin;
  tape.gates.colwise() += model.bias();
  tape.cells = MatrixXd::Zero(H, (T + 1) * B);
  tape.hin.resize(H, T * B);

  MatrixXd h = MatrixXd::Zero(H, B);
  MatrixXd c = MatrixXd::Zero(H, B);
  const auto W_h = model.w_h();
  for (Index t = 0; t < T; ++t) {
    auto hin = tape.hin.middleCols(t * B, B);
    hin = h.cwiseProduct(tape.rec_mask);
    auto z = tape.gates.middleCols(t * B, B);
    z.noalias() += W_h * hin;
    z.topRows(2 * H) = z.topRows(2 * H).unaryExpr(&sigmoid);
    z.middleRows(2 * H, H) = z.middleRows(2 * H, H).array().tanh().matrix();
    z.bottomRows(H) = z.bottomRows(H).unaryExpr(&sigmoid);
    for (Index b = 0; b < B; ++b) {
      if (t >= tape.lengths[static_cast<std::size_t>(b)]) continue;
      const auto gi = z.col(b).segment(0, H).array();
      const auto gf = z.col(b).segment(H, H).array();
      const auto gg = z.col(b).segment(2 * H, H).array();
      const auto go = z.col(b).segment(3 * H, H).array();
      c.col(b) = (gf * c.col(b).array() + gi * gg).matrix();
      h.col(b) = (go * c.col(b).array().tanh()).matrix();
    }
    tape.cells.middleCols((t + 1) * B, B) = c;
  }
  tape.h_final = h;

  const VectorXd logits = (h.transpose() * model.dense_w()).array() + model.dense_b();
  tape.probabilities.resize(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) tape.probabilities[static_cast<std::size_t>(b)] = sigmoid(logits[b]);
}

LossValue compute_loss(const LossSettings& s, std::span<const double> p,
                       std::span<const double> y) {
  if (s.kind == LossKind::weighted_bce) return weighted_bce_loss(p, y, s.positive_weight);
  return soft_f1_loss(p, y);
}

}  // namespace

double SequenceClassifier::forward(const MatrixXd& sequence) const {
  const MatrixXd* one[] = {&sequence};
  return forward_batch(*this, one).front();
}

std::vector<double> forward_batch(const SequenceClassifier& model, SequenceRefs sequences) {
  Tape tape;
  run_forward(model, sequences, {}, nullptr, tape);
  return tape.probabilities;
}

double batch_loss(const SequenceClassifier& model, SequenceRefs sequences,
                  std::span<const double> labels, const LossSettings& loss) {
  return compute_loss(loss, forward_batch(model, sequences), labels).loss;
}

BatchResult forward_backward(const SequenceClassifier& model, SequenceRefs sequences,
                             std::span<const double> labels, const LossSettings& loss,
                             const DropoutRates& dropout, Rng* rng, VectorXd& grad) {
  if (labels.size() != sequences.size()) throw ShapeMismatch("labels and sequences differ in count");
  Tape tape;
  run_forward(model, sequences, dropout, rng, tape);
  const LossValue lv = compute_loss(loss, tape.probabilities, labels);

  const auto H = static_cast<Index>(model.hidden_dim());
  const Index B = tape.batch;
  const Index T = tape.steps;

  grad = VectorXd::Zero(static_cast<Index>(model.param_count()));
  SequenceClassifier::Mat g_wx(grad.data(), 4 * H, static_cast<Index>(model.input_dim()));
  SequenceClassifier::Mat g_wh(grad.data() + g_wx.size(), 4 * H, H);
  SequenceClassifier::Vec g_b(grad.data() + g_wx.size() + g_wh.size(), 4 * H);
  SequenceClassifier::Vec g_dw(g_b.data() + 4 * H, H);
  double& g_db = grad[grad.size() - 1];

  Eigen::RowVectorXd dlogit(B);
  for (Index b = 0; b < B; ++b) {
    const double p = tape.probabilities[static_cast<std::size_t>(b)];
    dlogit[b] = lv.grad[static_cast<std::size_t>(b)] * p * (1.0 - p);
  }
  g_dw = tape.h_final * dlogit.transpose();
  g_db = dlogit.sum();

  MatrixXd dh = model.dense_w() * dlogit;  // H x B
  MatrixXd dc = MatrixXd::Zero(H, B);
  MatrixXd dz_all = MatrixXd::Zero(4 * H, T * B);
  const auto W_h = model.w_h();
  MatrixXd dz(4 * H, B);
  for (Index t = T - 1; t >= 0; --t) {
    const auto gates = tape.gates.middleCols(t * B, B);
    const auto c_prev = tape.cells.middleCols(t * B, B);
    const auto c_now = tape.cells.middleCols((t + 1) * B, B);
    dz.setZero();
    bool any = false;
    for (Index b = 0; b < B; ++b) {
      if (t >= tape.lengths[static_cast<std::size_t>(b)]) continue;
      any = true;
      const auto gi = gates.col(b).segment(0, H).array();
      const auto gf = gates.col(b).segment(H, H).array();
      const auto gg = gates.col(b).segment(2 * H, H).array();
      const auto go = gates.col(b).segment(3 * H, H).array();
      const Eigen::ArrayXd tc = c_now.col(b).array().tanh();
      const Eigen::ArrayXd dhb = dh.col(b).array();
      const Eigen::ArrayXd dct = dc.col(b).array() + dhb * go * (1.0 - tc.square());
      dz.col(b).segment(0, H) = (dct * gg * gi * (1.0 - gi)).matrix();
      dz.col(b).segment(H, H) = (dct * c_prev.col(b).array() * gf * (1.0 - gf)).matrix();
      dz.col(b).segment(2 * H, H) = (dct * gi * (1.0 - gg.square())).matrix();
      dz.col(b).segment(3 * H, H) = (dhb * tc * go * (1.0 - go)).matrix();
      dc.col(b) = (dct * gf).matrix();
    }
    if (!any) continue;
    dz_all.middleCols(t * B, B) = dz;
    const MatrixXd dh_prev = (W_h.transpose() * dz).cwiseProduct(tape.rec_mask);
    for (Index b = 0; b < B; ++b) {
      if (t < tape.lengths[static_cast<std::size_t>(b)]) dh.col(b) = dh_prev.col(b);
    }
  }
  g_wx.noalias() = dz_all * tape.xin.transpose();
  g_wh.noalias() = dz_all * tape.hin.transpose();
  g_b = dz_all.rowwise().sum();

  return {lv.loss, std::move(tape.probabilities)};
}

}  // namespace vudetect
