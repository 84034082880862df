// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_TRAIN_H_
#define MCSE_TRAIN_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "mcse/features.h"
#include "mcse/model.h"
#include "mcse/spectral.h"

namespace mcse {

enum class LossKind { kNegSiSnr, kMaskMse };

std::string LossName(LossKind kind);
LossKind LossFromName(const std::string& name);

struct TrainConfig {
  LossKind loss = LossKind::kNegSiSnr;
  double lr = 0.001;
  int lr_patience = 2;  // epochs without dev improvement before halving
  int epochs = 18;
  int batch_clips = 1;  // gradient accumulation per optimizer step
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip_norm = 5.0;  // global-norm clip; <= 0 disables

  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

// A fully materialized supervised pair.
struct TrainingExample {
  Eigen::MatrixXd features;        // 6F x T
  Spectrogram noisy_ref;           // X0: reference-channel mixture spectrum
  Spectrogram clean_spec;          // reference-channel clean spectrum
  std::vector<double> clean_ref;   // time-domain target
};

// Loads one dataset-manifest row (paths relative to the manifest directory).
TrainingExample LoadExample(const nlohmann::json& row,
                            const std::string& base_dir,
                            const StftConfig& stft_config);

// Loss (and, when grads is non-null, parameter gradients accumulated into a
// same-shaped MaskNet) for one clip. NegSiSnr differentiates through mask
// application and the inverse transform; MaskMse regresses on the ideal mask.
double ClipLossAndGrad(const MaskNet<double>& net,
                       const TrainingExample& example, LossKind kind,
                       double mask_bound, MaskNet<double>* grads);

// Smooth scale-invariant SNR loss used by training (no cap; eps-stabilized)
// plus its gradient w.r.t. the estimate. Exposed for oracle tests.
double NegSiSnrLoss(const std::vector<double>& estimate,
                    const std::vector<double>& reference,
                    std::vector<double>* grad_estimate);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double lr = 0.0;
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochLog> log;
  double best_dev_loss = 0.0;
  int best_epoch = 0;
};

// Runs the full loop: per-epoch shuffled passes, Adam updates, dev scoring,
// learning-rate halving after `lr_patience` stale epochs, and best-checkpoint
// restore. Deterministic for a fixed seed (single training thread). Writes a
// JSON Lines log when log_path is nonempty. Throws Error on NaN loss.
TrainResult Train(MaskNet<double>* net, const std::string& train_manifest,
                  const std::string& dev_manifest, const TrainConfig& config,
                  const StftConfig& stft_config,
                  const std::string& log_path = "");

}  // namespace mcse

#endif  // MCSE_TRAIN_H_
