// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mcse/common.h"
#include "mcse/features.h"

using namespace mcse;

namespace {

std::vector<double> RandomSignal(long n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.Uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("default pairs: linear arrays use channels 1-8") {
  for (Topology t : {Topology::kLinearUniform8, Topology::kLinearNonuniform8,
                     Topology::kDualLinear16}) {
    const PairSelection sel = DefaultPairs(t);
    CHECK(sel.channel_subset == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
    // Subset pairs (1,5),(2,6),(3,7),(4,8) in 1-based numbering.
    CHECK(sel.pairs[0] == std::pair<int, int>{0, 4});
    CHECK(sel.pairs[1] == std::pair<int, int>{1, 5});
    CHECK(sel.pairs[2] == std::pair<int, int>{2, 6});
    CHECK(sel.pairs[3] == std::pair<int, int>{3, 7});
  }
}

TEST_CASE("default pairs: circular takes every other channel") {
  const PairSelection sel = DefaultPairs(Topology::kCircular16);
  CHECK(sel.channel_subset == std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14});
  // Mapped back to original channels: (1,9),(3,11),(5,13),(7,15) 1-based.
  for (int p = 0; p < 4; ++p) {
    const auto [i, j] = sel.pairs[p];
    CHECK(i != j);
    const int orig_i = sel.channel_subset[i] + 1;
    const int orig_j = sel.channel_subset[j] + 1;
    CHECK(orig_i == 1 + 2 * p);
    CHECK(orig_j == 9 + 2 * p);
  }
}

TEST_CASE("selection validation") {
  PairSelection sel = DefaultPairs(Topology::kCircular16);
  CHECK_THROWS_AS(sel.Validate(8), InputError);  // channel 14 missing
  sel = DefaultPairs(Topology::kLinearUniform8);
  sel.pairs[2] = {3, 3};
  CHECK_THROWS_AS(sel.Validate(8), ConfigError);
  sel = DefaultPairs(Topology::kLinearUniform8);
  sel.channel_subset[1] = 0;  // duplicate
  CHECK_THROWS_AS(sel.Validate(8), ConfigError);
}

TEST_CASE("phase difference: identical and scaled channels give zero") {
  StftConfig cfg;
  const auto x = RandomSignal(8000, 1);
  const Spectrogram a = Stft(x, cfg);
  Spectrogram b = a;
  CHECK(Ipd(a, a).cwiseAbs().maxCoeff() == 0.0);
  b.bins *= 3.7;  // positive real gain: phase unchanged
  CHECK(Ipd(a, b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("phase difference matches the atan2 oracle and wraps correctly") {
  StftConfig cfg;
  cfg.fft_size = 64;
  cfg.frame_ms = 2.5;
  cfg.hop_ms = 1.25;
  Spectrogram a = Stft(RandomSignal(500, 2), cfg);
  Spectrogram b = Stft(RandomSignal(500, 3), cfg);
  const Eigen::MatrixXd ipd = Ipd(a, b);
  for (long t = 0; t < ipd.cols(); ++t)
    for (long k = 0; k < ipd.rows(); ++k) {
      // Elementwise brute force: wrapped difference of atan2 angles.
      const double pa =
          std::atan2(a.bins(k, t).imag(), a.bins(k, t).real());
      const double pb =
          std::atan2(b.bins(k, t).imag(), b.bins(k, t).real());
      double d = pa - pb;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d <= -M_PI) d += 2.0 * M_PI;
      CHECK(std::abs(ipd(k, t) - d) < 1e-12);
      CHECK(ipd(k, t) <= M_PI);
      CHECK(ipd(k, t) > -M_PI);
    }
}

TEST_CASE("feature tensor: layout, 6F height, identical-channel case") {
  StftConfig cfg;  // F = 257
  const PairSelection sel = DefaultPairs(Topology::kLinearUniform8);
  const auto x = RandomSignal(16000, 4);
  std::vector<std::vector<double>> channels(8, x);  // identical copies
  const FeatureTensor tensor = AssembleFeatures(channels, sel, cfg);
  CHECK(tensor.values.rows() == 6 * 257);
  CHECK(tensor.values.rows() == 1542);
  const long F = 257, T = tensor.values.cols();

  const Spectrogram x0 = Stft(x, cfg);
  CHECK(T == x0.bins.cols());
  // Re/Im blocks reproduce the reference-channel spectrogram.
  for (long t = 0; t < T; t += 17)
    for (long k = 0; k < F; k += 13) {
      CHECK(tensor.values(k, t) == doctest::Approx(x0.bins(k, t).real()));
      CHECK(tensor.values(F + k, t) ==
            doctest::Approx(x0.bins(k, t).imag()));
    }
  // All four cosIPD blocks equal one for identical channels.
  for (int p = 0; p < 4; ++p) {
    const auto block = tensor.values.block((2 + p) * F, 0, F, T);
    CHECK(block.minCoeff() == doctest::Approx(1.0));
    CHECK(block.maxCoeff() == doctest::Approx(1.0));
  }
}

TEST_CASE("plane-wave delay: cosIPD tracks cos(2 pi f tau)") {
  StftConfig cfg;
  const int fs = 16000;
  const double tau = 3.0 / fs;  // integer-sample delay keeps the test exact
  // Broadband noise delayed by tau on the second channel.
  const auto x = RandomSignal(fs, 5);
  std::vector<double> delayed(x.size(), 0.0);
  for (size_t i = 3; i < x.size(); ++i) delayed[i] = x[i - 3];

  PairSelection sel = DefaultPairs(Topology::kLinearUniform8);
  std::vector<std::vector<double>> channels(8, x);
  channels[4] = delayed;  // pair 0 = subset (0, 4)
  const FeatureTensor tensor = AssembleFeatures(channels, sel, cfg);

  const long F = 257;
  // Interior frames and bins away from band edges; tolerance 1e-3.
  const long t0 = 10, t1 = tensor.values.cols() - 10;
  for (long k = 8; k < F - 8; k += 7) {
    const double f_k = static_cast<double>(k) * fs / cfg.fft_size;
    const double expected = std::cos(2.0 * M_PI * f_k * tau);
    double worst = 0.0;
    for (long t = t0; t < t1; t += 29)
      worst = std::max(worst,
                       std::abs(tensor.values((2 + 0) * F + k, t) - expected));
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("cosIPD blocks are exactly gain-invariant, Re/Im blocks linear") {
  StftConfig cfg;
  cfg.fft_size = 128;
  cfg.frame_ms = 5.0;
  cfg.hop_ms = 2.5;
  const PairSelection sel = DefaultPairs(Topology::kLinearUniform8);
  std::vector<std::vector<double>> channels;
  for (int c = 0; c < 8; ++c) channels.push_back(RandomSignal(2000, 10 + c));
  const FeatureTensor base = AssembleFeatures(channels, sel, cfg);

  std::vector<std::vector<double>> scaled = channels;
  for (auto& ch : scaled)
    for (double& v : ch) v *= 4.25;
  const FeatureTensor gained = AssembleFeatures(scaled, sel, cfg);

  const long F = cfg.num_bins(), T = base.values.cols();
  // cosIPD blocks identical.
  CHECK((gained.values.block(2 * F, 0, 4 * F, T) -
         base.values.block(2 * F, 0, 4 * F, T))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // Re/Im blocks scale linearly.
  CHECK((gained.values.block(0, 0, 2 * F, T) -
         4.25 * base.values.block(0, 0, 2 * F, T))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("feature dump round trip") {
  StftConfig cfg;
  cfg.fft_size = 128;
  cfg.frame_ms = 5.0;
  cfg.hop_ms = 2.5;
  const PairSelection sel = DefaultPairs(Topology::kLinearUniform8);
  std::vector<std::vector<double>> channels;
  for (int c = 0; c < 8; ++c) channels.push_back(RandomSignal(1000, 20 + c));
  const FeatureTensor tensor = AssembleFeatures(channels, sel, cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "mcse_feat.bin").string();
  DumpFeatures(path, tensor);
  const FeatureTensor back = LoadFeatures(path);
  REQUIRE(back.values.rows() == tensor.values.rows());
  REQUIRE(back.values.cols() == tensor.values.cols());
  CHECK((back.values - tensor.values).cwiseAbs().maxCoeff() < 1e-5);
  std::remove(path.c_str());
}

TEST_CASE("missing channel raises") {
  StftConfig cfg;
  const PairSelection sel = DefaultPairs(Topology::kCircular16);
  std::vector<std::vector<double>> channels(8, RandomSignal(1000, 30));
  CHECK_THROWS_AS(AssembleFeatures(channels, sel, cfg), InputError);
}
