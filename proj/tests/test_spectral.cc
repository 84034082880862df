// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mcse/common.h"
#include "mcse/spectral.h"

using namespace mcse;

namespace {

std::vector<double> RandomSignal(long n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.Uniform(-1.0, 1.0);
  return x;
}

double RelativeL2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Direct frame enumeration: how many frame starts fit in the padded signal.
long EnumerateFrames(long signal_len, const StftConfig& cfg) {
  const long frame = cfg.frame_samples(), hop = cfg.hop_samples();
  const long padded =
      cfg.centered ? signal_len + 2 * (frame / 2)
                   : (frame - hop) + signal_len;
  long count = 0;
  if (cfg.centered) {
    for (long start = 0; start + frame <= padded; start += hop) ++count;
  } else {
    // Causal framing: frames accumulate until the last real sample is
    // covered; padded = left zero pad + signal.
    long covered = 0;
    for (long start = 0; covered < padded; start += hop) {
      covered = start + frame;
      ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("frame count: 6 s at the default config gives 601 x 257") {
  StftConfig cfg;
  const long len = 16000 * 6;
  CHECK(cfg.num_bins() == 257);
  CHECK(cfg.frame_samples() == 320);
  CHECK(cfg.hop_samples() == 160);
  CHECK(cfg.num_frames(len) == 601);
  CHECK(cfg.num_frames(len) == EnumerateFrames(len, cfg));
  const Spectrogram spec = Stft(RandomSignal(len, 5), cfg);
  CHECK(spec.bins.rows() == 257);
  CHECK(spec.bins.cols() == 601);
  // Odd lengths agree with the enumeration oracle too.
  for (long n : {1L, 159L, 160L, 161L, 4801L, 95999L})
    CHECK(cfg.num_frames(n) == EnumerateFrames(n, cfg));
}

TEST_CASE("all-zero signal maps to an all-zero spectrogram") {
  const Spectrogram spec = Stft(std::vector<double>(16000, 0.0), {});
  CHECK(spec.bins.cwiseAbs().maxCoeff() == 0.0);
  const std::vector<double> back = Istft(spec);
  for (double v : back) CHECK(v == 0.0);
}

TEST_CASE("pure 1 kHz tone peaks at bin 32") {
  StftConfig cfg;
  std::vector<double> x(16000);
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * 1000.0 * i / 16000.0);
  const Spectrogram spec = Stft(x, cfg);
  const long mid = spec.bins.cols() / 2;
  long argmax = 0;
  double best = -1.0;
  for (long k = 0; k < spec.bins.rows(); ++k)
    if (std::abs(spec.bins(k, mid)) > best) {
      best = std::abs(spec.bins(k, mid));
      argmax = k;
    }
  CHECK(argmax == 32);  // round(1000 * 512 / 16000)
}

TEST_CASE("round trip under the test matrix of COLA configs") {
  for (auto [frame_ms, hop_ms] : std::vector<std::pair<double, double>>{
           {20, 10}, {32, 16}, {40, 20}}) {
    StftConfig cfg;
    cfg.frame_ms = frame_ms;
    cfg.hop_ms = hop_ms;
    cfg.fft_size = 1024;  // roomy enough for the 40 ms frame
    for (Window w : {Window::kSqrtHann, Window::kHann}) {
      cfg.window = w;
      const std::vector<double> x = RandomSignal(16000 * 2 + 137, frame_ms);
      const std::vector<double> back = Istft(Stft(x, cfg));
      REQUIRE(back.size() == x.size());
      CHECK(RelativeL2(back, x) < 1e-6);
    }
  }
}

TEST_CASE("causal (streaming) framing also reconstructs exactly") {
  StftConfig cfg;
  cfg.centered = false;
  const std::vector<double> x = RandomSignal(16000 + 73, 9);
  CHECK(cfg.num_frames(x.size()) == EnumerateFrames(x.size(), cfg));
  const std::vector<double> back = Istft(Stft(x, cfg));
  REQUIRE(back.size() == x.size());
  CHECK(RelativeL2(back, x) < 1e-6);
}

TEST_CASE("linearity of the analysis transform") {
  StftConfig cfg;
  const auto x = RandomSignal(8000, 21), y = RandomSignal(8000, 22);
  std::vector<double> mix(8000);
  for (int i = 0; i < 8000; ++i) mix[i] = 2.5 * x[i] - 0.75 * y[i];
  const Spectrogram sx = Stft(x, cfg), sy = Stft(y, cfg), sm = Stft(mix, cfg);
  const double err =
      (sm.bins - 2.5 * sx.bins + 0.75 * sy.bins).cwiseAbs().maxCoeff();
  CHECK(err < 1e-9 * sm.bins.cwiseAbs().maxCoeff() + 1e-12);
}

TEST_CASE("Parseval: spectral energy equals window-compensated time energy") {
  StftConfig cfg;
  const std::vector<double> x = RandomSignal(16000, 33);
  const Spectrogram spec = Stft(x, cfg);

  // Oracle: re-enumerate the padded, windowed frames directly.
  const int frame = cfg.frame_samples();
  const long hop = cfg.hop_samples();
  const long pad = frame / 2;
  std::vector<double> padded(x.size() + 2 * pad);
  for (long i = 0; i < static_cast<long>(padded.size()); ++i) {
    long src = i - pad;
    if (src < 0) src = -src;
    if (src >= static_cast<long>(x.size()))
      src = 2 * (static_cast<long>(x.size()) - 1) - src;
    padded[i] = x[src];
  }
  const std::vector<double> win = MakeWindow(cfg.window, frame);
  double time_energy = 0.0;
  for (long t = 0; t < spec.bins.cols(); ++t)
    for (int i = 0; i < frame; ++i) {
      const double v = win[i] * padded[t * hop + i];
      time_energy += v * v;
    }

  double spec_energy = 0.0;
  for (long t = 0; t < spec.bins.cols(); ++t)
    for (long k = 0; k < spec.bins.rows(); ++k) {
      const double scale = (k == 0 || k == spec.bins.rows() - 1) ? 1.0 : 2.0;
      spec_energy += scale * std::norm(spec.bins(k, t));
    }
  spec_energy /= cfg.fft_size;

  CHECK(std::abs(spec_energy - time_energy) / time_energy < 1e-6);
}

TEST_CASE("istft adjoint satisfies the inner-product identity") {
  StftConfig cfg;
  cfg.fft_size = 64;
  cfg.frame_ms = 2.5;  // 40 samples
  cfg.hop_ms = 1.25;   // 20 samples
  const std::vector<double> x = RandomSignal(400, 44);
  Spectrogram spec = Stft(x, cfg);

  Rng rng(45);
  // Random complex perturbation of the bins, random time-domain functional.
  Eigen::MatrixXcd dy(spec.bins.rows(), spec.bins.cols());
  for (long t = 0; t < dy.cols(); ++t)
    for (long k = 0; k < dy.rows(); ++k)
      dy(k, t) = {rng.Gaussian(), rng.Gaussian()};
  std::vector<double> g(x.size());
  for (double& v : g) v = rng.Gaussian();

  Spectrogram moved = spec;
  moved.bins += dy;
  const std::vector<double> y0 = Istft(spec);
  const std::vector<double> y1 = Istft(moved);
  double lhs = 0.0;
  for (size_t i = 0; i < g.size(); ++i) lhs += (y1[i] - y0[i]) * g[i];

  const Eigen::MatrixXcd adj = IstftAdjoint(g, spec);
  double rhs = 0.0;
  for (long t = 0; t < dy.cols(); ++t)
    for (long k = 0; k < dy.rows(); ++k)
      rhs += dy(k, t).real() * adj(k, t).real() +
             dy(k, t).imag() * adj(k, t).imag();

  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("configuration and input errors") {
  CHECK_THROWS_AS(Stft({}, {}), InputError);
  StftConfig bad;
  bad.hop_ms = 30.0;  // hop > frame
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad = {};
  bad.frame_ms = 50.0;  // above the real-time bound
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad = {};
  bad.fft_size = 300;  // frame no longer fits
  CHECK_THROWS_AS(Stft(RandomSignal(1000, 1), bad), ConfigError);
}

TEST_CASE("spectrogram dump and load") {
  StftConfig cfg;
  const std::vector<double> x = RandomSignal(4800, 50);
  const Spectrogram spec = Stft(x, cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "mcse_spec.bin").string();
  DumpSpectrogram(path, spec);
  const Spectrogram back = LoadSpectrogram(path);
  REQUIRE(back.bins.rows() == spec.bins.rows());
  REQUIRE(back.bins.cols() == spec.bins.cols());
  CHECK(back.signal_length == spec.signal_length);
  // float32 payload: compare at single precision.
  CHECK((back.bins - spec.bins).cwiseAbs().maxCoeff() <
        1e-5 * spec.bins.cwiseAbs().maxCoeff() + 1e-6);
  std::remove(path.c_str());
}
