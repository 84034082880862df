// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/mask.h"

#include <algorithm>

#include "mcse/common.h"

namespace mcse {

void ComplexMask::CheckShape() const {
  if (real_part.rows() != imag_part.rows() ||
      real_part.cols() != imag_part.cols())
    throw ShapeError("mask: real/imag shapes differ");
}

Spectrogram ApplyMask(const ComplexMask& mask, const Spectrogram& x0) {
  mask.CheckShape();
  if (mask.real_part.rows() != x0.bins.rows() ||
      mask.real_part.cols() != x0.bins.cols())
    throw ShapeError("mask: mask and spectrogram shapes differ");

  Spectrogram y = x0;
  for (long t = 0; t < x0.bins.cols(); ++t)
    for (long k = 0; k < x0.bins.rows(); ++k) {
      const double mr = mask.real_part(k, t), mi = mask.imag_part(k, t);
      const double xr = x0.bins(k, t).real(), xi = x0.bins(k, t).imag();
      y.bins(k, t) = {mr * xr - mi * xi, mr * xi + mi * xr};
    }
  return y;
}

ComplexMask IdealCrm(const Spectrogram& clean_ref, const Spectrogram& noisy_ref,
                     double clamp, double eps) {
  if (clean_ref.bins.rows() != noisy_ref.bins.rows() ||
      clean_ref.bins.cols() != noisy_ref.bins.cols())
    throw ShapeError("ideal mask: shapes differ");
  ComplexMask mask;
  mask.real_part.resize(clean_ref.bins.rows(), clean_ref.bins.cols());
  mask.imag_part.resize(clean_ref.bins.rows(), clean_ref.bins.cols());
  for (long t = 0; t < clean_ref.bins.cols(); ++t)
    for (long k = 0; k < clean_ref.bins.rows(); ++k) {
      const std::complex<double> x = noisy_ref.bins(k, t);
      if (std::abs(x) < eps) {
        mask.real_part(k, t) = 0.0;
        mask.imag_part(k, t) = 0.0;
        continue;
      }
      const std::complex<double> m = clean_ref.bins(k, t) / x;
      mask.real_part(k, t) = std::clamp(m.real(), -clamp, clamp);
      mask.imag_part(k, t) = std::clamp(m.imag(), -clamp, clamp);
    }
  return mask;
}

double ClampedFraction(const Spectrogram& clean_ref,
                       const Spectrogram& noisy_ref, double clamp,
                       double eps) {
  long flagged = 0;
  const long total = clean_ref.bins.size();
  for (long t = 0; t < clean_ref.bins.cols(); ++t)
    for (long k = 0; k < clean_ref.bins.rows(); ++k) {
      const std::complex<double> x = noisy_ref.bins(k, t);
      if (std::abs(x) < eps) {
        ++flagged;
        continue;
      }
      const std::complex<double> m = clean_ref.bins(k, t) / x;
      if (std::abs(m.real()) > clamp || std::abs(m.imag()) > clamp) ++flagged;
    }
  return total == 0 ? 0.0 : static_cast<double>(flagged) / total;
}

}  // namespace mcse
