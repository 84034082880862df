// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_FEATURES_H_
#define MCSE_FEATURES_H_

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "mcse/geometry.h"
#include "mcse/spectral.h"

namespace mcse {

// Eight working channels and the four phase-difference pairs computed on
// them. `pairs` holds indices into `channel_subset`; all indices 0-based.
struct PairSelection {
  std::vector<int> channel_subset;
  std::array<std::pair<int, int>, 4> pairs;

  void Validate(int num_clip_channels) const;
};

// The per-topology defaults: linear arrays use their first 8 channels with
// pairs (1,5),(2,6),(3,7),(4,8); the 16-mic circular array keeps every other
// channel (odd 1-based), which lands the documented pairs
// (1,9),(3,11),(5,13),(7,15) on the same subset positions.
PairSelection DefaultPairs(Topology topology);

// Wrapped phase difference angle(O_i) - angle(O_j), elementwise in (-pi, pi].
Eigen::MatrixXd Ipd(const Spectrogram& spec_i, const Spectrogram& spec_j);

struct FeatureTensor {
  // 6F x T: rows [0,F) Re(X0), [F,2F) Im(X0), then cos(IPD) per pair.
  Eigen::MatrixXd values;
  StftConfig config;
  int fft_bins = 0;

  static constexpr int kBlockCount = 6;
};

struct FeatureOptions {
  // Mean/variance-normalize the Re/Im blocks per utterance (cosIPD blocks are
  // left untouched so they stay in [-1, 1]). Off by default.
  bool normalize_utterance = false;
};

// Computes the feature stack from the spectrograms of the subset channels,
// ordered as in `selection.channel_subset` (X0 = the first of them).
FeatureTensor AssembleFeatures(
    const std::vector<Spectrogram>& subset_spectra,
    const PairSelection& selection, const FeatureOptions& options = {});

// Convenience path from a multichannel buffer: runs the STFT on the subset
// channels then stacks. Throws InputError on a missing channel.
FeatureTensor AssembleFeatures(
    const std::vector<std::vector<double>>& channels,
    const PairSelection& selection, const StftConfig& stft_config,
    const FeatureOptions& options = {});

// Interchange dump: little-endian header {magic, F, T, block_count} then
// row-major float32 payload.
void DumpFeatures(const std::string& path, const FeatureTensor& tensor);
FeatureTensor LoadFeatures(const std::string& path);

}  // namespace mcse

#endif  // MCSE_FEATURES_H_
