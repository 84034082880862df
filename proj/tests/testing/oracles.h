// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Test-only reference implementations. Everything here is deliberately
// independent of the library code paths it checks: straightforward loops,
// textbook formulas, no shared helpers.

#ifndef MCSE_TESTS_TESTING_ORACLES_H_
#define MCSE_TESTS_TESTING_ORACLES_H_

#include <cmath>
#include <complex>
#include <vector>

namespace mcse::testing {

// Direct O(N*M) convolution.
inline std::vector<double> NaiveConvolve(const std::vector<double>& a,
                                         const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Eyring reverberation-time prediction for a shoebox with uniform energy
// absorption.
inline double EyringT60Oracle(double lx, double ly, double lz, double alpha) {
  const double volume = lx * ly * lz;
  const double surface = 2.0 * (lx * ly + lx * lz + ly * lz);
  return 0.161 * volume / (-surface * std::log(1.0 - alpha));
}

// Schroeder backward integration + least-squares line fit on the decay curve
// between -5 dB and -25 dB, extrapolated to the 60 dB decay time.
inline double SchroederT60(const std::vector<double>& h, int sample_rate) {
  const size_t n = h.size();
  std::vector<double> edc(n);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  const double total = edc[0];
  std::vector<double> xs, ys;
  for (size_t i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i] / total);
    if (db <= -5.0 && db >= -25.0) {
      xs.push_back(static_cast<double>(i) / sample_rate);
      ys.push_back(db);
    }
  }
  if (xs.size() < 8) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (slope >= 0.0) return 0.0;
  return -60.0 / slope;
}

// First index where |h| reaches at least `fraction` of the channel peak.
inline long OnsetIndex(const std::vector<double>& h, double fraction) {
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  for (size_t i = 0; i < h.size(); ++i)
    if (std::abs(h[i]) >= fraction * peak) return static_cast<long>(i);
  return -1;
}

// Index of the largest |h| value.
inline long PeakIndex(const std::vector<double>& h) {
  long best = 0;
  double peak = -1.0;
  for (size_t i = 0; i < h.size(); ++i)
    if (std::abs(h[i]) > peak) {
      peak = std::abs(h[i]);
      best = static_cast<long>(i);
    }
  return best;
}

// Scale-invariant SNR straight from the definition, no caps.
inline double SiSnrOracle(const std::vector<double>& est,
                          const std::vector<double>& ref) {
  const size_t n = est.size();
  double me = 0, mr = 0;
  for (size_t i = 0; i < n; ++i) {
    me += est[i];
    mr += ref[i];
  }
  me /= n;
  mr /= n;
  double dot = 0, ss = 0;
  for (size_t i = 0; i < n; ++i) {
    dot += (est[i] - me) * (ref[i] - mr);
    ss += (ref[i] - mr) * (ref[i] - mr);
  }
  const double a = dot / ss;
  double tt = 0, ee = 0;
  for (size_t i = 0; i < n; ++i) {
    const double t = a * (ref[i] - mr);
    const double e = (est[i] - me) - t;
    tt += t * t;
    ee += e * e;
  }
  return 10.0 * std::log10(tt / ee);
}

}  // namespace mcse::testing

#endif  // MCSE_TESTS_TESTING_ORACLES_H_
