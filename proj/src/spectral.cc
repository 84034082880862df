// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/spectral.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mcse/common.h"
#include "mcse/fft.h"

namespace mcse {

int StftConfig::frame_samples() const {
  return static_cast<int>(std::lround(frame_ms * sample_rate / 1000.0));
}

int StftConfig::hop_samples() const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void StftConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("stft: sample_rate must be > 0");
  if (frame_ms <= 0.0 || hop_ms <= 0.0)
    throw ConfigError("stft: frame and hop must be > 0");
  if (frame_ms > 40.0)
    throw ConfigError("stft: frame length above the 40 ms bound");
  if (hop_samples() > frame_samples())
    throw ConfigError("stft: hop must not exceed frame");
  if (frame_samples() > fft_size)
    throw ConfigError("stft: frame does not fit the FFT size");
  if (fft_size < 2 || (fft_size & 1))
    throw ConfigError("stft: fft_size must be even");
}

long StftConfig::num_frames(long signal_len) const {
  const long frame = frame_samples(), hop = hop_samples();
  if (signal_len <= 0) throw InputError("stft: empty signal");
  if (centered) {
    const long padded = signal_len + 2 * (frame / 2);
    if (padded < frame) throw InputError("stft: signal too short");
    return 1 + (padded - frame) / hop;
  }
  return (signal_len + hop - 1) / hop;  // causal: ceil(len / hop)
}

std::vector<double> MakeWindow(Window window, int length) {
  // Periodic Hann; its square overlap-adds to a constant at 50% hop.
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / length);
    w[n] = window == Window::kSqrtHann ? std::sqrt(hann) : hann;
  }
  return w;
}

namespace {

struct Framing {
  long pad_left = 0;
  long padded_len = 0;
  long num_frames = 0;
};

Framing MakeFraming(const StftConfig& cfg, long signal_len) {
  const long frame = cfg.frame_samples(), hop = cfg.hop_samples();
  Framing fr;
  fr.num_frames = cfg.num_frames(signal_len);
  fr.pad_left = cfg.centered ? frame / 2 : frame - hop;
  const long span = (fr.num_frames - 1) * hop + frame;
  fr.padded_len = std::max(span, fr.pad_left + signal_len);
  return fr;
}

std::vector<double> PadSignal(const std::vector<double>& x,
                              const StftConfig& cfg, const Framing& fr) {
  const long len = static_cast<long>(x.size());
  std::vector<double> padded(fr.padded_len, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + fr.pad_left);
  if (cfg.centered) {
    // Reflect padding (no edge repeat): x[-k] = x[k], x[len-1+k] = x[len-1-k].
    for (long k = 1; k <= fr.pad_left; ++k) {
      long src = k < len ? k : len - 1;
      padded[fr.pad_left - k] = x[src];
    }
    for (long k = 1; fr.pad_left + len - 1 + k < fr.padded_len; ++k) {
      long src = len - 1 - k;
      if (src < 0) src = 0;
      padded[fr.pad_left + len - 1 + k] = x[src];
    }
  }
  return padded;
}

}  // namespace

Spectrogram Stft(const std::vector<double>& signal, const StftConfig& config) {
  config.Validate();
  if (signal.empty()) throw InputError("stft: empty signal");
  const int frame = config.frame_samples();
  const long hop = config.hop_samples();
  const Framing fr = MakeFraming(config, static_cast<long>(signal.size()));
  const std::vector<double> padded = PadSignal(signal, config, fr);
  const std::vector<double> win = MakeWindow(config.window, frame);

  RealFft fft(config.fft_size);
  Spectrogram spec;
  spec.config = config;
  spec.signal_length = static_cast<long>(signal.size());
  spec.bins.resize(config.num_bins(), fr.num_frames);

  std::vector<double> buf(config.fft_size, 0.0);
  std::vector<std::complex<double>> col(config.num_bins());
  for (long t = 0; t < fr.num_frames; ++t) {
    const double* src = padded.data() + t * hop;
    for (int i = 0; i < frame; ++i) buf[i] = src[i] * win[i];
    // frame occupies [0, frame); the zero-padded tail stays zero
    fft.Forward(buf.data(), col.data());
    for (int k = 0; k < config.num_bins(); ++k) spec.bins(k, t) = col[k];
  }
  return spec;
}

namespace {

// Shared by Istft and its adjoint: squared-window overlap-add profile.
std::vector<double> OverlapDenominator(const StftConfig& cfg,
                                       const Framing& fr) {
  const int frame = cfg.frame_samples();
  const long hop = cfg.hop_samples();
  const std::vector<double> win = MakeWindow(cfg.window, frame);
  std::vector<double> den(fr.padded_len, 0.0);
  for (long t = 0; t < fr.num_frames; ++t)
    for (int i = 0; i < frame; ++i) den[t * hop + i] += win[i] * win[i];
  return den;
}

void CheckCoverage(const std::vector<double>& den, const Framing& fr,
                   long signal_len) {
  double max_den = 0.0;
  for (double d : den) max_den = std::max(max_den, d);
  for (long n = fr.pad_left; n < fr.pad_left + signal_len; ++n)
    if (den[n] < 1e-10 * max_den)
      throw ConfigError(
          "istft: window/hop combination leaves gaps in overlap-add");
}

}  // namespace

std::vector<double> Istft(const Spectrogram& spec) {
  const StftConfig& cfg = spec.config;
  cfg.Validate();
  if (spec.signal_length <= 0) throw InputError("istft: unknown length");
  const int frame = cfg.frame_samples();
  const long hop = cfg.hop_samples();
  const Framing fr = MakeFraming(cfg, spec.signal_length);
  if (spec.bins.cols() != fr.num_frames || spec.bins.rows() != cfg.num_bins())
    throw ShapeError("istft: spectrogram shape inconsistent with config");
  const std::vector<double> win = MakeWindow(cfg.window, frame);
  const std::vector<double> den = OverlapDenominator(cfg, fr);
  CheckCoverage(den, fr, spec.signal_length);

  RealFft fft(cfg.fft_size);
  std::vector<double> num(fr.padded_len, 0.0);
  std::vector<std::complex<double>> col(cfg.num_bins());
  std::vector<double> buf(cfg.fft_size);
  for (long t = 0; t < fr.num_frames; ++t) {
    for (int k = 0; k < cfg.num_bins(); ++k) col[k] = spec.bins(k, t);
    fft.Inverse(col.data(), buf.data());
    for (int i = 0; i < frame; ++i) num[t * hop + i] += win[i] * buf[i];
  }
  std::vector<double> out(spec.signal_length);
  for (long n = 0; n < spec.signal_length; ++n)
    out[n] = num[fr.pad_left + n] / den[fr.pad_left + n];
  return out;
}

Eigen::MatrixXcd IstftAdjoint(const std::vector<double>& grad_signal,
                              const Spectrogram& like) {
  const StftConfig& cfg = like.config;
  cfg.Validate();
  if (static_cast<long>(grad_signal.size()) != like.signal_length)
    throw ShapeError("istft adjoint: gradient length mismatch");
  const int frame = cfg.frame_samples();
  const long hop = cfg.hop_samples();
  const int nbins = cfg.num_bins();
  const Framing fr = MakeFraming(cfg, like.signal_length);
  const std::vector<double> win = MakeWindow(cfg.window, frame);
  const std::vector<double> den = OverlapDenominator(cfg, fr);

  std::vector<double> gnum(fr.padded_len, 0.0);
  for (long n = 0; n < like.signal_length; ++n)
    gnum[fr.pad_left + n] = grad_signal[n] / den[fr.pad_left + n];

  RealFft fft(cfg.fft_size);
  Eigen::MatrixXcd grad(nbins, fr.num_frames);
  std::vector<double> buf(cfg.fft_size, 0.0);
  std::vector<std::complex<double>> col(nbins);
  const double inv_n = 1.0 / cfg.fft_size;
  for (long t = 0; t < fr.num_frames; ++t) {
    for (int i = 0; i < frame; ++i) buf[i] = win[i] * gnum[t * hop + i];
    std::fill(buf.begin() + frame, buf.end(), 0.0);
    fft.Forward(buf.data(), col.data());
    // Fold the full-spectrum gradient onto the packed half spectrum: interior
    // bins carry their conjugate twins, DC/Nyquist imaginary parts are inert.
    for (int k = 0; k < nbins; ++k) {
      double scale = (k == 0 || k == nbins - 1) ? inv_n : 2.0 * inv_n;
      std::complex<double> g = col[k] * scale;
      if (k == 0 || k == nbins - 1) g = {g.real(), 0.0};
      grad(k, t) = g;
    }
  }
  return grad;
}

namespace {

constexpr char kSpecMagic[4] = {'M', 'C', 'S', 'P'};

template <typename T>
void PutRaw(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T GetRaw(std::ifstream& f) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void DumpSpectrogram(const std::string& path, const Spectrogram& spec) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("spectrogram dump: cannot open " + path);
  f.write(kSpecMagic, 4);
  PutRaw<uint32_t>(f, 1);  // version
  PutRaw<uint32_t>(f, static_cast<uint32_t>(spec.bins.rows()));
  PutRaw<uint64_t>(f, static_cast<uint64_t>(spec.bins.cols()));
  PutRaw<uint32_t>(f, static_cast<uint32_t>(spec.config.sample_rate));
  PutRaw<double>(f, spec.config.frame_ms);
  PutRaw<double>(f, spec.config.hop_ms);
  PutRaw<uint32_t>(f, static_cast<uint32_t>(spec.config.fft_size));
  PutRaw<uint8_t>(f, spec.config.window == Window::kSqrtHann ? 1 : 0);
  PutRaw<uint8_t>(f, spec.config.centered ? 1 : 0);
  PutRaw<int32_t>(f, spec.channel_id);
  PutRaw<uint64_t>(f, static_cast<uint64_t>(spec.signal_length));
  for (long k = 0; k < spec.bins.rows(); ++k)
    for (long t = 0; t < spec.bins.cols(); ++t) {
      PutRaw<float>(f, static_cast<float>(spec.bins(k, t).real()));
      PutRaw<float>(f, static_cast<float>(spec.bins(k, t).imag()));
    }
  if (!f) throw IoError("spectrogram dump: write failed: " + path);
}

Spectrogram LoadSpectrogram(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("spectrogram load: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kSpecMagic, 4) != 0)
    throw FormatError("spectrogram load: bad magic: " + path);
  if (GetRaw<uint32_t>(f) != 1)
    throw FormatError("spectrogram load: unsupported version");
  const auto rows = GetRaw<uint32_t>(f);
  const auto cols = GetRaw<uint64_t>(f);
  Spectrogram spec;
  spec.config.sample_rate = static_cast<int>(GetRaw<uint32_t>(f));
  spec.config.frame_ms = GetRaw<double>(f);
  spec.config.hop_ms = GetRaw<double>(f);
  spec.config.fft_size = static_cast<int>(GetRaw<uint32_t>(f));
  spec.config.window = GetRaw<uint8_t>(f) ? Window::kSqrtHann : Window::kHann;
  spec.config.centered = GetRaw<uint8_t>(f) != 0;
  spec.channel_id = GetRaw<int32_t>(f);
  spec.signal_length = static_cast<long>(GetRaw<uint64_t>(f));
  spec.bins.resize(rows, static_cast<long>(cols));
  for (uint32_t k = 0; k < rows; ++k)
    for (uint64_t t = 0; t < cols; ++t) {
      float re = GetRaw<float>(f), im = GetRaw<float>(f);
      spec.bins(k, static_cast<long>(t)) = {re, im};
    }
  if (!f) throw FormatError("spectrogram load: truncated file: " + path);
  return spec;
}

}  // namespace mcse
