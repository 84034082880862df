// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>

#include "mcse/common.h"
#include "mcse/mask.h"

using namespace mcse;

namespace {

Spectrogram RandomSpec(long F, long T, uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Spectrogram s;
  s.bins.resize(F, T);
  for (long t = 0; t < T; ++t)
    for (long k = 0; k < F; ++k)
      s.bins(k, t) = {scale * rng.Gaussian(), scale * rng.Gaussian()};
  s.signal_length = T;  // not used by mask ops
  return s;
}

ComplexMask RandomMask(long F, long T, uint64_t seed) {
  Rng rng(seed);
  ComplexMask m;
  m.real_part.resize(F, T);
  m.imag_part.resize(F, T);
  for (long t = 0; t < T; ++t)
    for (long k = 0; k < F; ++k) {
      m.real_part(k, t) = rng.Uniform(-3.0, 3.0);
      m.imag_part(k, t) = rng.Uniform(-3.0, 3.0);
    }
  return m;
}

}  // namespace

TEST_CASE("identity and zero masks") {
  const Spectrogram x = RandomSpec(33, 21, 1);
  ComplexMask one;
  one.real_part = Eigen::MatrixXd::Ones(33, 21);
  one.imag_part = Eigen::MatrixXd::Zero(33, 21);
  const Spectrogram y = ApplyMask(one, x);
  CHECK((y.bins - x.bins).cwiseAbs().maxCoeff() == 0.0);

  ComplexMask zero;
  zero.real_part = Eigen::MatrixXd::Zero(33, 21);
  zero.imag_part = Eigen::MatrixXd::Zero(33, 21);
  CHECK(ApplyMask(zero, x).bins.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mask application is elementwise complex multiplication (1e6 el)") {
  const long F = 1000, T = 1000;
  const Spectrogram x = RandomSpec(F, T, 2);
  const ComplexMask m = RandomMask(F, T, 3);
  const Spectrogram y = ApplyMask(m, x);
  // Independent route: std::complex arithmetic.
  double worst = 0.0;
  for (long t = 0; t < T; ++t)
    for (long k = 0; k < F; ++k) {
      const std::complex<double> expected =
          std::complex<double>(m.real_part(k, t), m.imag_part(k, t)) *
          x.bins(k, t);
      worst = std::max(worst, std::abs(y.bins(k, t) - expected));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("shape mismatches raise") {
  const Spectrogram x = RandomSpec(16, 10, 4);
  ComplexMask m = RandomMask(16, 9, 5);
  CHECK_THROWS_AS(ApplyMask(m, x), ShapeError);
  m = RandomMask(16, 10, 6);
  m.imag_part.resize(15, 10);
  CHECK_THROWS_AS(ApplyMask(m, x), ShapeError);
  CHECK_THROWS_AS(IdealCrm(RandomSpec(16, 9, 7), x), ShapeError);
}

TEST_CASE("ideal mask: self-division and zero-clean cases") {
  const Spectrogram x = RandomSpec(40, 30, 8);
  const ComplexMask self = IdealCrm(x, x);
  CHECK((self.real_part.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(self.imag_part.cwiseAbs().maxCoeff() < 1e-12);

  Spectrogram zero = x;
  zero.bins.setZero();
  const ComplexMask null_mask = IdealCrm(zero, x);
  CHECK(null_mask.real_part.cwiseAbs().maxCoeff() == 0.0);
  CHECK(null_mask.imag_part.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ideal mask reconstructs exactly on unclamped bins") {
  const Spectrogram clean = RandomSpec(64, 50, 9);
  Spectrogram noisy = RandomSpec(64, 50, 10);
  noisy.bins += clean.bins;  // mixture
  const double clamp = 10.0;
  const ComplexMask mask = IdealCrm(clean, noisy, clamp);
  const Spectrogram rec = ApplyMask(mask, noisy);
  for (long t = 0; t < 50; ++t)
    for (long k = 0; k < 64; ++k) {
      const std::complex<double> ratio = clean.bins(k, t) / noisy.bins(k, t);
      const bool clamped = std::abs(ratio.real()) > clamp ||
                           std::abs(ratio.imag()) > clamp ||
                           std::abs(noisy.bins(k, t)) < 1e-8;
      if (!clamped)
        CHECK(std::abs(rec.bins(k, t) - clean.bins(k, t)) <
              1e-10 * (1.0 + std::abs(clean.bins(k, t))));
    }
  // Flagged fraction is reported and small for this construction.
  const double flagged = ClampedFraction(clean, noisy, clamp);
  CHECK(flagged >= 0.0);
  CHECK(flagged < 0.05);
}

TEST_CASE("degenerate bins get a zero mask under the eps rule") {
  Spectrogram clean = RandomSpec(8, 4, 11);
  Spectrogram noisy = RandomSpec(8, 4, 12);
  noisy.bins(3, 2) = {1e-12, 0.0};  // below eps
  const ComplexMask mask = IdealCrm(clean, noisy, 10.0, 1e-8);
  CHECK(mask.real_part(3, 2) == 0.0);
  CHECK(mask.imag_part(3, 2) == 0.0);
}

TEST_CASE("clamping bounds the mask parts") {
  Spectrogram clean = RandomSpec(8, 6, 13, /*scale=*/100.0);
  Spectrogram noisy = RandomSpec(8, 6, 14, /*scale=*/0.5);
  const ComplexMask mask = IdealCrm(clean, noisy, 10.0);
  CHECK(mask.real_part.cwiseAbs().maxCoeff() <= 10.0);
  CHECK(mask.imag_part.cwiseAbs().maxCoeff() <= 10.0);
}
