// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mcse/common.h"
#include "mcse/fft.h"
#include "mcse/wav.h"
#include "testing/oracles.h"

using namespace mcse;

namespace {
std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("float32 wav round trip, multichannel") {
  Rng rng(1);
  AudioBuffer buf;
  buf.sample_rate = 16000;
  buf.data.assign(3, std::vector<double>(1000));
  for (auto& ch : buf.data)
    for (double& v : ch) v = rng.Uniform(-1.0, 1.0);
  const std::string path = TempPath("mcse_test_f32.wav");
  WriteWavFloat32(path, buf);
  AudioBuffer back = ReadWav(path);
  REQUIRE(back.num_channels() == 3);
  REQUIRE(back.num_samples() == 1000);
  CHECK(back.sample_rate == 16000);
  for (int c = 0; c < 3; ++c)
    for (long i = 0; i < 1000; ++i)
      CHECK(back.data[c][i] ==
            doctest::Approx(buf.data[c][i]).epsilon(1e-7));
  std::remove(path.c_str());
}

TEST_CASE("pcm16 wav round trip") {
  AudioBuffer buf;
  buf.sample_rate = 16000;
  buf.data = {{0.0, 0.5, -0.5, 0.25}};
  const std::string path = TempPath("mcse_test_p16.wav");
  WriteWavPcm16(path, buf);
  AudioBuffer back = ReadWav(path);
  REQUIRE(back.num_samples() == 4);
  for (long i = 0; i < 4; ++i)
    CHECK(std::abs(back.data[0][i] - buf.data[0][i]) < 1.0 / 32768.0);
  std::remove(path.c_str());
}

TEST_CASE("wav errors") {
  CHECK_THROWS_AS(ReadWav("/nonexistent/file.wav"), IoError);
  const std::string path = TempPath("mcse_test_bad.wav");
  {
    std::ofstream f(path);
    f << "not a wav file at all";
  }
  CHECK_THROWS_AS(ReadWav(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("fft inverse is exact") {
  RealFft fft(64);
  Rng rng(7);
  std::vector<double> x(64);
  for (double& v : x) v = rng.Gaussian();
  std::vector<std::complex<double>> spec(fft.num_bins());
  std::vector<double> back(64);
  fft.Forward(x.data(), spec.data());
  fft.Inverse(spec.data(), back.data());
  for (int i = 0; i < 64; ++i)
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("fft convolution matches the direct oracle") {
  Rng rng(11);
  std::vector<double> a(16000), b(1600);
  for (double& v : a) v = rng.Uniform(-1.0, 1.0);
  for (double& v : b) v = rng.Uniform(-1.0, 1.0);
  const std::vector<double> fast = FftConvolve(a, b);
  const std::vector<double> slow = testing::NaiveConvolve(a, b);
  REQUIRE(fast.size() == slow.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < fast.size(); ++i) {
    num += (fast[i] - slow[i]) * (fast[i] - slow[i]);
    den += slow[i] * slow[i];
  }
  CHECK(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("fft parameter checks") {
  CHECK_THROWS_AS(RealFft(3), ParamError);
  CHECK_THROWS_AS(FftConvolve({}, {1.0}), InputError);
}
