// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_SPECTRAL_H_
#define MCSE_SPECTRAL_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mcse {

enum class Window { kHann, kSqrtHann };

// Analysis/synthesis framing. Defaults give the 20 ms / 10 ms, 512-point
// setup: 320-sample frames zero-padded to 512, 257 bins, sqrt-Hann window on
// both sides (exact overlap-add reconstruction at 50% hop).
struct StftConfig {
  double frame_ms = 20.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  Window window = Window::kSqrtHann;
  int sample_rate = 16000;
  // Centered (reflect) padding gives deterministic frame counts for offline
  // processing; causal mode left-pads with zeros only and is what the
  // streaming path uses.
  bool centered = true;

  int frame_samples() const;
  int hop_samples() const;
  int num_bins() const { return fft_size / 2 + 1; }
  long num_frames(long signal_len) const;
  void Validate() const;
};

std::vector<double> MakeWindow(Window window, int length);

struct Spectrogram {
  Eigen::MatrixXcd bins;  // F x T
  StftConfig config;
  int channel_id = 0;
  long signal_length = 0;  // pre-analysis length; Istft trims back to it
};

// Forward transform. Throws InputError on an empty signal.
Spectrogram Stft(const std::vector<double>& signal, const StftConfig& config);

// Weighted overlap-add inverse. Exact round trip (istft(stft(x)) == x up to
// rounding) for any window/hop whose squared-window overlap stays positive;
// throws ConfigError otherwise.
std::vector<double> Istft(const Spectrogram& spec);

// Adjoint of Istft as a linear map from the time domain back to bins, for
// gradient propagation: <Istft(Y), g> == sum Re(Y .* conj(IstftAdjoint(g))).
// `like` supplies shape, config and signal length.
Eigen::MatrixXcd IstftAdjoint(const std::vector<double>& grad_signal,
                              const Spectrogram& like);

// Debug dump: little-endian header {magic, F, T, sample_rate, signal_length}
// then row-major interleaved complex float32.
void DumpSpectrogram(const std::string& path, const Spectrogram& spec);
Spectrogram LoadSpectrogram(const std::string& path);

}  // namespace mcse

#endif  // MCSE_SPECTRAL_H_
