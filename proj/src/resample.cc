// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/resample.h"

#include <cmath>

#include "mcse/common.h"

namespace mcse {

namespace {

// Modified Bessel function of the first kind, order 0 (power series).
double BesselI0(double x) {
  const double half = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> DesignResampleFilter(int up, int down) {
  if (up < 1 || down < 1) throw ParamError("resample: factors must be >= 1");
  const int max_rate = std::max(up, down);
  const double cutoff = 1.0 / max_rate;  // relative to Nyquist
  const int half_len = 10 * max_rate;
  const int taps = 2 * half_len + 1;
  const double beta = 5.0;

  std::vector<double> h(taps);
  const double i0_beta = BesselI0(beta);
  double dc = 0.0;
  for (int n = 0; n < taps; ++n) {
    const double m = n - half_len;
    const double frac = 2.0 * n / (taps - 1) - 1.0;  // [-1, 1]
    const double w = BesselI0(beta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) /
                     i0_beta;
    h[n] = cutoff * Sinc(cutoff * m) * w;
    dc += h[n];
  }
  for (double& v : h) v *= static_cast<double>(up) / dc;  // unity DC, then up
  return h;
}

std::vector<double> ResamplePoly(const std::vector<double>& x, int up,
                                 int down) {
  if (x.empty()) throw InputError("resample: empty signal");
  if (up == down) return x;
  const std::vector<double> h = DesignResampleFilter(up, down);
  const int half_len = (static_cast<int>(h.size()) - 1) / 2;

  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * up + down - 1) / down;

  // y[m] = sum_k h[k] x_up[m*down + delay - k], with the filter's group
  // delay compensated so outputs align with input time m*down/up.
  std::vector<double> y(n_out, 0.0);
  for (long m = 0; m < n_out; ++m) {
    const long center = m * down + half_len;
    double acc = 0.0;
    // x_up[i] = x[i/up] when i % up == 0. Iterate only the nonzero taps.
    long i_min = center - (static_cast<long>(h.size()) - 1);
    if (i_min < 0) i_min = 0;
    long i = i_min + ((up - i_min % up) % up);  // round up to multiple of up
    for (; i <= center && i < n_in * up; i += up) {
      const long k = center - i;
      acc += h[k] * x[i / up];
    }
    y[m] = acc;
  }
  return y;
}

}  // namespace mcse
