// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_ENHANCE_H_
#define MCSE_ENHANCE_H_

#include <memory>
#include <string>
#include <vector>

#include "mcse/features.h"
#include "mcse/mixer.h"
#include "mcse/model.h"
#include "mcse/spectral.h"

namespace mcse {

// Selection score: 10*log10(RMS(y) / RMS(y - x)) on the time-domain noisy
// signal x and enhanced signal y. Literally the amplitude-RMS ratio inside
// the log; +inf sentinel when y == x exactly.
double EstimatedSnr(const std::vector<double>& noisy,
                    const std::vector<double>& enhanced);

struct ArrayCandidate {
  int array_id = 0;
  std::vector<double> noisy;
  std::vector<double> enhanced;
};

struct SelectionResult {
  int array_id = 0;
  double score_db = 0.0;
  const std::vector<double>* enhanced = nullptr;
};

// Picks the candidate with the highest EstimatedSnr; ties break toward the
// lowest array_id. Throws InputError on an empty list.
SelectionResult SelectArray(const std::vector<ArrayCandidate>& candidates);

// Offline enhancement: stft -> features -> mask -> apply -> istft. Output
// length equals the clip length.
std::vector<double> EnhanceClip(const MultichannelClip& clip,
                                const MaskNet<double>& model,
                                const PairSelection& selection,
                                const StftConfig& stft_config);

// Single-pass causal enhancer for the real-time path: consumes multichannel
// samples in arbitrary chunk sizes, emits enhanced mono with one frame of
// algorithmic latency. One instance per stream; not shareable across threads
// (the model parameters it references are).
class StreamingEnhancer {
 public:
  // Requires a causal configuration (centered=false): refuses configurations
  // that would need future samples.
  StreamingEnhancer(std::shared_ptr<const MaskNet<float>> model,
                    const PairSelection& selection,
                    const StftConfig& stft_config);
  ~StreamingEnhancer();

  int num_input_channels() const;

  // Feeds `count` new samples per subset channel (channels[c][i], indexed by
  // clip channel id) and appends any newly available output samples.
  void Feed(const std::vector<const double*>& channels, long count,
            std::vector<double>* output);

  // Flushes the tail so total output length equals total input length.
  void Flush(std::vector<double>* output);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper: streams a whole clip through a fresh enhancer.
std::vector<double> EnhanceClipStreaming(const MultichannelClip& clip,
                                         std::shared_ptr<const MaskNet<float>> model,
                                         const PairSelection& selection,
                                         const StftConfig& stft_config);

}  // namespace mcse

#endif  // MCSE_ENHANCE_H_
