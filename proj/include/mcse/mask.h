// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_MASK_H_
#define MCSE_MASK_H_

#include <Eigen/Dense>

#include "mcse/spectral.h"

namespace mcse {

// Complex ratio mask, kept as separate real/imaginary planes. Estimator
// outputs are bounded to [-kMaskBound, kMaskBound] on both parts.
struct ComplexMask {
  Eigen::MatrixXd real_part;  // M_r, F x T
  Eigen::MatrixXd imag_part;  // M_i, F x T

  static constexpr double kMaskBound = 10.0;

  void CheckShape() const;
};

// Y_r = M_r X_r - M_i X_i, Y_i = M_r X_i + M_i X_r: elementwise complex
// multiplication of the mask with the reference-channel spectrum.
Spectrogram ApplyMask(const ComplexMask& mask, const Spectrogram& x0);

// Ideal mask S / X with real and imaginary parts clamped to +-clamp; bins
// with |X| < eps get a zero mask.
ComplexMask IdealCrm(const Spectrogram& clean_ref, const Spectrogram& noisy_ref,
                     double clamp = ComplexMask::kMaskBound,
                     double eps = 1e-8);

// Fraction of bins where IdealCrm saturated its clamp (diagnostic for the
// exact-reconstruction property, which only holds on unclamped bins).
double ClampedFraction(const Spectrogram& clean_ref,
                       const Spectrogram& noisy_ref, double clamp,
                       double eps = 1e-8);

}  // namespace mcse

#endif  // MCSE_MASK_H_
