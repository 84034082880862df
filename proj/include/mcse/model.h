// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_MODEL_H_
#define MCSE_MODEL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcse/common.h"
#include "mcse/mask.h"

namespace mcse {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct MaskNetConfig {
  int fft_bins = 257;  // F; input height 6F, output width 2F
  int hidden = 512;
  int layers = 3;
  double mask_bound = ComplexMask::kMaskBound;

  int input_dim() const { return 6 * fft_bins; }
  int output_dim() const { return 2 * fft_bins; }
  void Validate() const {
    if (fft_bins < 1 || hidden < 1 || layers < 1 || mask_bound <= 0.0)
      throw ConfigError("model: bad configuration");
  }
};

// One recurrent layer, gates stacked as [input; forget; cell; output].
template <typename Scalar>
struct LstmLayer {
  MatX<Scalar> w_input;      // 4H x in
  MatX<Scalar> w_recurrent;  // 4H x H
  VecX<Scalar> bias;         // 4H
};

// Recurrent mask estimator: stacked LSTM layers plus an affine projection to
// 2F mask values per frame, compressed through bound*tanh(x/bound). Strictly
// causal: frame t depends on features 0..t only.
template <typename Scalar>
class MaskNet {
 public:
  explicit MaskNet(const MaskNetConfig& config) : config_(config) {
    config.Validate();
    const int H = config.hidden;
    lstm_.resize(config.layers);
    for (int l = 0; l < config.layers; ++l) {
      const int in = l == 0 ? config.input_dim() : H;
      lstm_[l].w_input = MatX<Scalar>::Zero(4 * H, in);
      lstm_[l].w_recurrent = MatX<Scalar>::Zero(4 * H, H);
      lstm_[l].bias = VecX<Scalar>::Zero(4 * H);
    }
    fc_w_ = MatX<Scalar>::Zero(config.output_dim(), H);
    fc_b_ = VecX<Scalar>::Zero(config.output_dim());
  }

  const MaskNetConfig& config() const { return config_; }

  // Uniform(-1/sqrt(H), 1/sqrt(H)) with the forget-gate bias offset to +1.
  void InitRandom(uint64_t seed) {
    Rng rng(seed);
    const double k = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
    VisitParams([&](Scalar& v) {
      v = static_cast<Scalar>(rng.Uniform(-k, k));
    });
    const int H = config_.hidden;
    for (auto& layer : lstm_)
      for (int i = 0; i < H; ++i)
        layer.bias(H + i) += Scalar(1);  // forget gate
  }

  struct State {
    std::vector<VecX<Scalar>> h, c;
  };

  State MakeState() const {
    State s;
    s.h.assign(config_.layers, VecX<Scalar>::Zero(config_.hidden));
    s.c.assign(config_.layers, VecX<Scalar>::Zero(config_.hidden));
    return s;
  }

  // One causal step: 6F feature column in, 2F bounded mask column out.
  void Step(const VecX<Scalar>& features, State* state,
            VecX<Scalar>* mask_col) const {
    const int H = config_.hidden;
    VecX<Scalar> x = features;
    for (int l = 0; l < config_.layers; ++l) {
      const LstmLayer<Scalar>& p = lstm_[l];
      VecX<Scalar> z = p.w_input * x + p.w_recurrent * state->h[l] + p.bias;
      VecX<Scalar>& c = state->c[l];
      VecX<Scalar>& h = state->h[l];
      for (int i = 0; i < H; ++i) {
        const Scalar gi = Sigmoid(z(i));
        const Scalar gf = Sigmoid(z(H + i));
        const Scalar gg = std::tanh(z(2 * H + i));
        const Scalar go = Sigmoid(z(3 * H + i));
        c(i) = gf * c(i) + gi * gg;
        h(i) = go * std::tanh(c(i));
      }
      x = h;
    }
    const auto bound = static_cast<Scalar>(config_.mask_bound);
    *mask_col = fc_w_ * x + fc_b_;
    for (long i = 0; i < mask_col->size(); ++i)
      (*mask_col)(i) = bound * std::tanh((*mask_col)(i) / bound);
  }

  // Offline estimate over a full feature tensor (6F x T). The offline and
  // streaming paths share Step, so they agree exactly.
  ComplexMask EstimateMask(const Eigen::MatrixXd& features) const {
    if (features.rows() != config_.input_dim())
      throw ShapeError("model: feature height " +
                       std::to_string(features.rows()) + " != 6F = " +
                       std::to_string(config_.input_dim()));
    const long T = features.cols();
    const int F = config_.fft_bins;
    State state = MakeState();
    ComplexMask mask;
    mask.real_part.resize(F, T);
    mask.imag_part.resize(F, T);
    VecX<Scalar> col(config_.input_dim()), out(config_.output_dim());
    for (long t = 0; t < T; ++t) {
      col = features.col(t).template cast<Scalar>();
      Step(col, &state, &out);
      for (int k = 0; k < F; ++k) {
        mask.real_part(k, t) = static_cast<double>(out(k));
        mask.imag_part(k, t) = static_cast<double>(out(F + k));
      }
    }
    return mask;
  }

  // Parameter blocks in canonical (checkpoint) order.
  std::vector<LstmLayer<Scalar>>& lstm() { return lstm_; }
  const std::vector<LstmLayer<Scalar>>& lstm() const { return lstm_; }
  MatX<Scalar>& fc_weight() { return fc_w_; }
  const MatX<Scalar>& fc_weight() const { return fc_w_; }
  VecX<Scalar>& fc_bias() { return fc_b_; }
  const VecX<Scalar>& fc_bias() const { return fc_b_; }

  long num_parameters() const {
    long n = 0;
    const_cast<MaskNet*>(this)->VisitParams([&](Scalar&) { ++n; });
    return n;
  }

  // Visits every parameter in canonical order: per layer w_input,
  // w_recurrent, bias (row-major), then the projection weight and bias.
  template <typename Fn>
  void VisitParams(Fn&& fn) {
    auto visit_mat = [&](MatX<Scalar>& m) {
      for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) fn(m(r, c));
    };
    auto visit_vec = [&](VecX<Scalar>& v) {
      for (long i = 0; i < v.size(); ++i) fn(v(i));
    };
    for (auto& layer : lstm_) {
      visit_mat(layer.w_input);
      visit_mat(layer.w_recurrent);
      visit_vec(layer.bias);
    }
    visit_mat(fc_w_);
    visit_vec(fc_b_);
  }

  static Scalar Sigmoid(Scalar x) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
  }

 private:
  MaskNetConfig config_;
  std::vector<LstmLayer<Scalar>> lstm_;
  MatX<Scalar> fc_w_;
  VecX<Scalar> fc_b_;
};

// Checkpoint: versioned binary header {F, hidden, layers} + little-endian
// float32 parameter blob, with a JSON sidecar (<path>.json) echoing training
// metadata when provided.
void SaveCheckpoint(const std::string& path, const MaskNet<double>& net,
                    const nlohmann::json& sidecar = {});
MaskNetConfig PeekCheckpoint(const std::string& path);
MaskNet<double> LoadCheckpoint(const std::string& path);
MaskNet<float> LoadCheckpointFloat(const std::string& path);

}  // namespace mcse

#endif  // MCSE_MODEL_H_
