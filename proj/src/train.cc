// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/train.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "mcse/manifest.h"
#include "mcse/mask.h"
#include "mcse/wav.h"

namespace mcse {

using json = nlohmann::json;

std::string LossName(LossKind kind) {
  return kind == LossKind::kNegSiSnr ? "neg_sisnr" : "mask_mse";
}

LossKind LossFromName(const std::string& name) {
  if (name == "neg_sisnr") return LossKind::kNegSiSnr;
  if (name == "mask_mse") return LossKind::kMaskMse;
  throw ConfigError("train: unknown loss: " + name);
}

void TrainConfig::Validate() const {
  if (lr <= 0.0) throw ConfigError("train: lr must be > 0");
  if (lr_patience < 1) throw ConfigError("train: patience must be >= 1");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (batch_clips < 1) throw ConfigError("train: batch_clips must be >= 1");
}

json TrainConfig::ToJson() const {
  return json{{"loss", LossName(loss)},
              {"lr", lr},
              {"lr_patience", lr_patience},
              {"epochs", epochs},
              {"batch_clips", batch_clips},
              {"seed", seed},
              {"adam_beta1", adam_beta1},
              {"adam_beta2", adam_beta2},
              {"adam_eps", adam_eps},
              {"grad_clip_norm", grad_clip_norm}};
}

TrainConfig TrainConfig::FromJson(const json& j) {
  TrainConfig c;
  if (j.contains("loss")) c.loss = LossFromName(j.at("loss").get<std::string>());
  c.lr = j.value("lr", c.lr);
  c.lr_patience = j.value("lr_patience", c.lr_patience);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_clips = j.value("batch_clips", c.batch_clips);
  c.seed = j.value("seed", c.seed);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
  return c;
}

TrainingExample LoadExample(const json& row, const std::string& base_dir,
                            const StftConfig& stft_config) {
  const auto base = std::filesystem::path(base_dir);
  AudioBuffer mixture =
      ReadWav((base / row.at("mixture").get<std::string>()).string());
  AudioBuffer reference =
      ReadWav((base / row.at("reference").get<std::string>()).string());
  if (reference.num_channels() != 1)
    throw FormatError("train: reference must be mono");
  const Topology topo = TopologyFromName(row.at("geometry").get<std::string>());
  const PairSelection selection = DefaultPairs(topo);

  TrainingExample ex;
  ex.features =
      AssembleFeatures(mixture.data, selection, stft_config).values;
  ex.noisy_ref = Stft(mixture.data[selection.channel_subset[0]], stft_config);
  ex.clean_ref = reference.data[0];
  ex.clean_spec = Stft(ex.clean_ref, stft_config);
  return ex;
}

double NegSiSnrLoss(const std::vector<double>& estimate,
                    const std::vector<double>& reference,
                    std::vector<double>* grad_estimate) {
  if (estimate.size() != reference.size() || estimate.empty())
    throw ShapeError("sisnr loss: length mismatch");
  const long n = static_cast<long>(estimate.size());
  const double inv_n = 1.0 / n;

  double mean_e = 0.0, mean_r = 0.0;
  for (long i = 0; i < n; ++i) {
    mean_e += estimate[i];
    mean_r += reference[i];
  }
  mean_e *= inv_n;
  mean_r *= inv_n;

  double dot = 0.0, ss = 0.0;
  std::vector<double> y(n), s(n);
  for (long i = 0; i < n; ++i) {
    y[i] = estimate[i] - mean_e;
    s[i] = reference[i] - mean_r;
    dot += y[i] * s[i];
    ss += s[i] * s[i];
  }
  if (ss <= 0.0) throw InputError("sisnr loss: zero reference");

  const double alpha = dot / ss;
  double tt = 0.0, ee = 0.0;
  std::vector<double> resid(n);
  for (long i = 0; i < n; ++i) {
    const double t = alpha * s[i];
    resid[i] = y[i] - t;
    tt += t * t;
    ee += resid[i] * resid[i];
  }
  constexpr double kEps = 1e-10;
  const double loss =
      -10.0 / std::log(10.0) * (std::log(tt + kEps) - std::log(ee + kEps));

  if (grad_estimate != nullptr) {
    // dL/dy = -(20/ln10) (alpha s / (|t|^2+eps) - e / (|e|^2+eps)), then the
    // zero-mean projection.
    grad_estimate->assign(n, 0.0);
    const double k = -20.0 / std::log(10.0);
    double gsum = 0.0;
    for (long i = 0; i < n; ++i) {
      const double g = k * (alpha * s[i] / (tt + kEps) - resid[i] / (ee + kEps));
      (*grad_estimate)[i] = g;
      gsum += g;
    }
    const double gmean = gsum * inv_n;
    for (long i = 0; i < n; ++i) (*grad_estimate)[i] -= gmean;
  }
  return loss;
}

namespace {

// Activations stashed by the forward pass for backpropagation through time.
struct Trace {
  std::vector<Eigen::MatrixXd> gates;  // per layer, 4H x T (post-activation)
  std::vector<Eigen::MatrixXd> cell;   // per layer, H x T
  std::vector<Eigen::MatrixXd> hidden; // per layer, H x T
  Eigen::MatrixXd mask;                // 2F x T, bounded output
};

Trace ForwardWithTrace(const MaskNet<double>& net,
                       const Eigen::MatrixXd& features) {
  const MaskNetConfig& cfg = net.config();
  if (features.rows() != cfg.input_dim())
    throw ShapeError("train: feature height != 6F");
  const long T = features.cols();
  const int H = cfg.hidden;

  Trace tr;
  tr.gates.assign(cfg.layers, Eigen::MatrixXd(4 * H, T));
  tr.cell.assign(cfg.layers, Eigen::MatrixXd(H, T));
  tr.hidden.assign(cfg.layers, Eigen::MatrixXd(H, T));
  tr.mask.resize(cfg.output_dim(), T);

  std::vector<Eigen::VectorXd> h(cfg.layers, Eigen::VectorXd::Zero(H));
  std::vector<Eigen::VectorXd> c(cfg.layers, Eigen::VectorXd::Zero(H));
  Eigen::VectorXd x, z(4 * H);
  for (long t = 0; t < T; ++t) {
    x = features.col(t);
    for (int l = 0; l < cfg.layers; ++l) {
      const LstmLayer<double>& p = net.lstm()[l];
      z = p.w_input * x + p.w_recurrent * h[l] + p.bias;
      for (int i = 0; i < H; ++i) {
        const double gi = MaskNet<double>::Sigmoid(z(i));
        const double gf = MaskNet<double>::Sigmoid(z(H + i));
        const double gg = std::tanh(z(2 * H + i));
        const double go = MaskNet<double>::Sigmoid(z(3 * H + i));
        c[l](i) = gf * c[l](i) + gi * gg;
        h[l](i) = go * std::tanh(c[l](i));
        tr.gates[l](i, t) = gi;
        tr.gates[l](H + i, t) = gf;
        tr.gates[l](2 * H + i, t) = gg;
        tr.gates[l](3 * H + i, t) = go;
      }
      tr.cell[l].col(t) = c[l];
      tr.hidden[l].col(t) = h[l];
      x = h[l];
    }
    Eigen::VectorXd out = net.fc_weight() * x + net.fc_bias();
    const double bound = cfg.mask_bound;
    for (long i = 0; i < out.size(); ++i)
      out(i) = bound * std::tanh(out(i) / bound);
    tr.mask.col(t) = out;
  }
  return tr;
}

// Backpropagates d(loss)/d(bounded mask) into parameter gradients.
void BackwardFromMaskGrad(const MaskNet<double>& net,
                          const Eigen::MatrixXd& features, const Trace& tr,
                          const Eigen::MatrixXd& dmask,
                          MaskNet<double>* grads) {
  const MaskNetConfig& cfg = net.config();
  const long T = features.cols();
  const int H = cfg.hidden;
  const double bound = cfg.mask_bound;

  // Through the tanh compression: dm/dz = 1 - (m / bound)^2.
  Eigen::MatrixXd dfc(cfg.output_dim(), T);
  for (long t = 0; t < T; ++t)
    for (long i = 0; i < cfg.output_dim(); ++i) {
      const double m = tr.mask(i, t) / bound;
      dfc(i, t) = dmask(i, t) * (1.0 - m * m);
    }

  // Projection layer.
  const Eigen::MatrixXd& h_top = tr.hidden[cfg.layers - 1];
  grads->fc_weight() += dfc * h_top.transpose();
  grads->fc_bias() += dfc.rowwise().sum();
  Eigen::MatrixXd dx_above = net.fc_weight().transpose() * dfc;  // H x T

  for (int l = cfg.layers - 1; l >= 0; --l) {
    const LstmLayer<double>& p = net.lstm()[l];
    LstmLayer<double>& g = grads->lstm()[l];
    const Eigen::MatrixXd& below =
        l == 0 ? features : tr.hidden[l - 1];  // in x T

    Eigen::VectorXd dh_rec = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
    Eigen::MatrixXd dx_below =
        Eigen::MatrixXd::Zero(below.rows(), T);
    Eigen::VectorXd dz(4 * H);
    for (long t = T - 1; t >= 0; --t) {
      for (int i = 0; i < H; ++i) {
        const double gi = tr.gates[l](i, t);
        const double gf = tr.gates[l](H + i, t);
        const double gg = tr.gates[l](2 * H + i, t);
        const double go = tr.gates[l](3 * H + i, t);
        const double ct = tr.cell[l](i, t);
        const double cprev = t > 0 ? tr.cell[l](i, t - 1) : 0.0;
        const double tc = std::tanh(ct);

        const double dh = dx_above(i, t) + dh_rec(i);
        const double dgo = dh * tc;
        const double dc = dc_next(i) + dh * go * (1.0 - tc * tc);
        const double dgi = dc * gg;
        const double dgg = dc * gi;
        const double dgf = dc * cprev;
        dc_next(i) = dc * gf;

        dz(i) = dgi * gi * (1.0 - gi);
        dz(H + i) = dgf * gf * (1.0 - gf);
        dz(2 * H + i) = dgg * (1.0 - gg * gg);
        dz(3 * H + i) = dgo * go * (1.0 - go);
      }
      g.w_input += dz * below.col(t).transpose();
      if (t > 0) {
        g.w_recurrent += dz * tr.hidden[l].col(t - 1).transpose();
        dh_rec = p.w_recurrent.transpose() * dz;
      } else {
        dh_rec.setZero();
      }
      g.bias += dz;
      dx_below.col(t) = p.w_input.transpose() * dz;
    }
    dx_above = std::move(dx_below);
  }
}

ComplexMask MaskFromTrace(const Trace& tr, int fft_bins) {
  ComplexMask mask;
  mask.real_part = tr.mask.topRows(fft_bins);
  mask.imag_part = tr.mask.bottomRows(fft_bins);
  return mask;
}

}  // namespace

double ClipLossAndGrad(const MaskNet<double>& net,
                       const TrainingExample& example, LossKind kind,
                       double mask_bound, MaskNet<double>* grads) {
  const int F = net.config().fft_bins;
  const Trace tr = ForwardWithTrace(net, example.features);
  const ComplexMask mask = MaskFromTrace(tr, F);

  double loss = 0.0;
  Eigen::MatrixXd dmask(2 * F, tr.mask.cols());

  if (kind == LossKind::kNegSiSnr) {
    Spectrogram y = ApplyMask(mask, example.noisy_ref);
    std::vector<double> estimate = Istft(y);
    std::vector<double> grad_est;
    loss = NegSiSnrLoss(estimate, example.clean_ref,
                        grads != nullptr ? &grad_est : nullptr);
    if (grads != nullptr) {
      const Eigen::MatrixXcd dy = IstftAdjoint(grad_est, y);
      // dM = conj(X) .* dY, split into planes.
      for (long t = 0; t < dy.cols(); ++t)
        for (int k = 0; k < F; ++k) {
          const std::complex<double> d =
              std::conj(example.noisy_ref.bins(k, t)) * dy(k, t);
          dmask(k, t) = d.real();
          dmask(F + k, t) = d.imag();
        }
    }
  } else {
    const ComplexMask target =
        IdealCrm(example.clean_spec, example.noisy_ref, mask_bound);
    const long total = 2L * F * tr.mask.cols();
    double acc = 0.0;
    for (long t = 0; t < tr.mask.cols(); ++t)
      for (int k = 0; k < F; ++k) {
        const double dr = mask.real_part(k, t) - target.real_part(k, t);
        const double di = mask.imag_part(k, t) - target.imag_part(k, t);
        acc += dr * dr + di * di;
        if (grads != nullptr) {
          dmask(k, t) = 2.0 * dr / total;
          dmask(F + k, t) = 2.0 * di / total;
        }
      }
    loss = acc / total;
  }

  if (grads != nullptr)
    BackwardFromMaskGrad(net, example.features, tr, dmask, grads);
  return loss;
}

namespace {

std::vector<double*> ParamPtrs(MaskNet<double>* net) {
  std::vector<double*> ptrs;
  net->VisitParams([&](double& v) { ptrs.push_back(&v); });
  return ptrs;
}

class Adam {
 public:
  Adam(size_t n, const TrainConfig& cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void Step(const std::vector<double*>& params,
            const std::vector<double*>& grads, double lr) {
    ++t_;
    const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, t_);
    const double bc2 = 1.0 - std::pow(b2, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      const double g = *grads[i];
      m_[i] = b1 * m_[i] + (1.0 - b1) * g;
      v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      *params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
    }
  }

 private:
  TrainConfig cfg_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

void ZeroParams(MaskNet<double>* net) {
  net->VisitParams([](double& v) { v = 0.0; });
}

double GradNorm(MaskNet<double>* grads) {
  double acc = 0.0;
  grads->VisitParams([&](double& v) { acc += v * v; });
  return std::sqrt(acc);
}

}  // namespace

TrainResult Train(MaskNet<double>* net, const std::string& train_manifest,
                  const std::string& dev_manifest, const TrainConfig& config,
                  const StftConfig& stft_config, const std::string& log_path) {
  config.Validate();
  const auto load_set = [&](const std::string& path) {
    Manifest m = ReadManifest(path);
    const std::string dir =
        std::filesystem::path(path).parent_path().string();
    std::vector<TrainingExample> out;
    for (const json& row : m.rows) {
      if (row.value("status", "ok") != "ok") continue;
      out.push_back(LoadExample(row, dir, stft_config));
    }
    return out;
  };
  const std::vector<TrainingExample> train_set = load_set(train_manifest);
  const std::vector<TrainingExample> dev_set = load_set(dev_manifest);
  if (train_set.empty() || dev_set.empty())
    throw InputError("train: empty dataset");

  const double mask_bound = net->config().mask_bound;
  MaskNet<double> grads(net->config());
  MaskNet<double> best(net->config());
  const std::vector<double*> params = ParamPtrs(net);
  const std::vector<double*> grad_ptrs = ParamPtrs(&grads);
  Adam adam(params.size(), config);
  Rng rng(config.seed);

  const auto eval_dev = [&]() {
    double acc = 0.0;
    for (const TrainingExample& ex : dev_set)
      acc += ClipLossAndGrad(*net, ex, config.loss, mask_bound, nullptr);
    return acc / dev_set.size();
  };

  TrainResult result;
  result.best_dev_loss = std::numeric_limits<double>::infinity();
  double lr = config.lr;
  int stale_epochs = 0;
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::trunc);
    if (!log) throw IoError("train: cannot open log " + log_path);
  }

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    // Deterministic per-epoch shuffle from the single training stream.
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.UniformInt(0, static_cast<int>(i) - 1)]);

    double train_loss = 0.0;
    int in_batch = 0;
    ZeroParams(&grads);
    for (size_t n = 0; n < order.size(); ++n) {
      const TrainingExample& ex = train_set[order[n]];
      const double loss =
          ClipLossAndGrad(*net, ex, config.loss, mask_bound, &grads);
      if (!std::isfinite(loss))
        throw Error("train: non-finite loss at epoch " +
                    std::to_string(epoch) + ", clip " + std::to_string(n));
      train_loss += loss;
      ++in_batch;
      if (in_batch == config.batch_clips || n + 1 == order.size()) {
        const double scale = 1.0 / in_batch;
        grads.VisitParams([&](double& v) { v *= scale; });
        if (config.grad_clip_norm > 0.0) {
          const double norm = GradNorm(&grads);
          if (norm > config.grad_clip_norm) {
            const double s = config.grad_clip_norm / norm;
            grads.VisitParams([&](double& v) { v *= s; });
          }
        }
        adam.Step(params, grad_ptrs, lr);
        ZeroParams(&grads);
        in_batch = 0;
      }
    }
    train_loss /= train_set.size();

    const double dev_loss = eval_dev();
    if (!std::isfinite(dev_loss))
      throw Error("train: non-finite dev loss at epoch " +
                  std::to_string(epoch));

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = train_loss;
    entry.dev_loss = dev_loss;
    entry.improved = dev_loss < result.best_dev_loss;
    if (entry.improved) {
      result.best_dev_loss = dev_loss;
      result.best_epoch = epoch;
      stale_epochs = 0;
      // Snapshot best parameters.
      std::vector<double> flat;
      net->VisitParams([&](double& v) { flat.push_back(v); });
      size_t i = 0;
      best.VisitParams([&](double& v) { v = flat[i++]; });
    } else {
      ++stale_epochs;
      if (stale_epochs >= config.lr_patience) {
        lr *= 0.5;
        stale_epochs = 0;
      }
    }
    entry.lr = lr;
    result.log.push_back(entry);
    if (log.is_open()) {
      log << json{{"epoch", entry.epoch},
                  {"train_loss", entry.train_loss},
                  {"dev_loss", entry.dev_loss},
                  {"lr", entry.lr},
                  {"improved", entry.improved}}
                 .dump()
          << "\n";
    }
  }

  // Hand back the best-dev parameters.
  std::vector<double> flat;
  best.VisitParams([&](double& v) { flat.push_back(v); });
  size_t i = 0;
  net->VisitParams([&](double& v) { v = flat[i++]; });
  return result;
}

}  // namespace mcse
