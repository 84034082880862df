// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_MIXER_H_
#define MCSE_MIXER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcse/roomsim.h"
#include "mcse/wav.h"

namespace mcse {

struct ClipProvenance {
  std::string speech_id, noise_id, speech_rir_id, noise_rir_id;
  double snr_db = 0.0;
  uint64_t seed = 0;
  double normalization_scale = 1.0;  // common gain applied after peak check
};

struct MultichannelClip {
  AudioBuffer audio;         // channels x samples
  std::string geometry_ref;  // topology name; channel order = mic order
  ClipProvenance provenance;

  int num_channels() const { return audio.num_channels(); }
  long num_samples() const { return audio.num_samples(); }
};

// One mixture recipe: which sources, which responses, what SNR.
struct MixtureSpec {
  std::string speech_path, noise_path;
  std::string speech_rir_id, noise_rir_id;
  double snr_db = 0.0;
  double clip_seconds = 6.0;
  uint64_t seed = 0;

  void Validate(double snr_min = 0.0, double snr_max = 30.0) const;
};

// Linear convolution of a dry mono signal against every RIR channel.
// Output length is dry + rir - 1, or `trim_len` when given. Throws
// FormatError when the sample rates disagree.
MultichannelClip ConvolveMultichannel(const std::vector<double>& dry,
                                      int dry_sample_rate, const Rir& rir,
                                      long trim_len = -1);

// Scales the noise by one scalar so the reference-channel SNR equals snr_db,
// then adds. Throws ParamError for non-finite SNR, InputError for
// zero-energy reference channels.
MultichannelClip MixAtSnr(const MultichannelClip& speech,
                          const MultichannelClip& noise, double snr_db,
                          int ref_channel = 0);

// Simple energy-based voice activity SNR estimate used by the optional
// ingestion gate (active frames vs background frames).
double EstimateSpeechSnrDb(const std::vector<double>& signal, int sample_rate);

struct SynthesisOptions {
  int sample_rate = 16000;
  int ref_channel = 0;
  bool normalize_peak = true;  // common rescale when |mixture| exceeds 1
  // Optional ingestion gate: skip specs whose speech fails this estimated
  // SNR; disabled when unset.
  std::optional<double> speech_gate_min_snr_db;
  double snr_min_db = 0.0, snr_max_db = 30.0;
  int jobs = 1;
  nlohmann::json config_echo;  // embedded in the manifest header when set
};

struct SynthesisResult {
  std::string manifest_path;
  int num_written = 0;
  int num_skipped = 0;
};

// Builds one multichannel mixture WAV plus an aligned reverberant-clean
// reference WAV per spec, and a JSON Lines manifest with full provenance.
// Missing assets are reported together in a single error. Deterministic for
// fixed seeds regardless of `jobs`.
SynthesisResult SynthesizeDataset(const std::vector<MixtureSpec>& specs,
                                  const std::string& rir_manifest_path,
                                  const std::string& out_dir,
                                  const SynthesisOptions& options = {});

}  // namespace mcse

#endif  // MCSE_MIXER_H_
