// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_METRICS_H_
#define MCSE_METRICS_H_

#include <vector>

namespace mcse {

// Scale-invariant SNR: zero-mean both signals, project the estimate onto the
// reference, 10*log10(|target|^2 / |residual|^2), capped to +-60 dB so
// aggregates stay finite. Throws InputError for a zero reference.
double SiSnrDb(const std::vector<double>& estimate,
               const std::vector<double>& reference);

constexpr double kSiSnrCapDb = 60.0;

// Short-time objective intelligibility (and its extended variant) on
// 16 kHz or native 10 kHz input; other rates are rejected. Internally:
// resample to 10 kHz, drop frames more than 40 dB below the loudest clean
// frame, 256/128 STFT, 15 one-third-octave bands from 150 Hz, 30-frame
// segments; the extended variant normalizes rows and columns per segment
// instead of clipping. Throws InputError when fewer than 30 frames survive.
double Stoi(const std::vector<double>& estimate,
            const std::vector<double>& reference, int sample_rate,
            bool extended = false);

}  // namespace mcse

#endif  // MCSE_METRICS_H_
