// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mcse/common.h"
#include "mcse/fft.h"
#include "mcse/resample.h"

namespace mcse {

double SiSnrDb(const std::vector<double>& estimate,
               const std::vector<double>& reference) {
  if (estimate.size() != reference.size() || estimate.empty())
    throw InputError("sisnr: empty or mismatched signals");
  const long n = static_cast<long>(estimate.size());
  double me = 0.0, mr = 0.0;
  for (long i = 0; i < n; ++i) {
    me += estimate[i];
    mr += reference[i];
  }
  me /= n;
  mr /= n;
  double dot = 0.0, ss = 0.0;
  for (long i = 0; i < n; ++i) {
    const double e = estimate[i] - me, s = reference[i] - mr;
    dot += e * s;
    ss += s * s;
  }
  if (ss <= 0.0) throw InputError("sisnr: zero reference");
  const double alpha = dot / ss;
  double tt = 0.0, ee = 0.0;
  for (long i = 0; i < n; ++i) {
    const double s = reference[i] - mr;
    const double t = alpha * s;
    const double r = (estimate[i] - me) - t;
    tt += t * t;
    ee += r * r;
  }
  if (ee <= 0.0) return kSiSnrCapDb;
  if (tt <= 0.0) return -kSiSnrCapDb;
  return std::clamp(Db(tt / ee), -kSiSnrCapDb, kSiSnrCapDb);
}

namespace {

// Front-end constants of the published intelligibility algorithm.
constexpr int kStoiFs = 10000;
constexpr int kFrame = 256;
constexpr int kHop = 128;
constexpr int kFft = 512;
constexpr int kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegment = 30;       // frames per short-time segment
constexpr double kDynRange = 40.0; // silence threshold below the loudest frame
constexpr double kBetaDb = -15.0;  // clipping level (classic variant)
constexpr double kEps = 1e-16;

// Symmetric Hann with implicit zero endpoints dropped: hanning(N+2)[1:-1].
std::vector<double> StoiWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (i + 1) / (n + 1));
  return w;
}

// Drops frames whose clean-signal energy sits more than kDynRange dB below
// the loudest frame, overlap-adding the survivors back into signals.
void RemoveSilentFrames(std::vector<double>* x, std::vector<double>* y) {
  const std::vector<double> w = StoiWindow(kFrame);
  const long n = static_cast<long>(x->size());
  std::vector<long> starts;
  for (long i = 0; i + kFrame < n; i += kHop) starts.push_back(i);
  if (starts.empty()) {
    x->clear();
    y->clear();
    return;
  }
  std::vector<double> energy_db(starts.size());
  double max_db = -1e300;
  for (size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (int i = 0; i < kFrame; ++i) {
      const double v = w[i] * (*x)[starts[f] + i];
      e += v * v;
    }
    energy_db[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
    max_db = std::max(max_db, energy_db[f]);
  }
  std::vector<long> kept;
  for (size_t f = 0; f < starts.size(); ++f)
    if (max_db - kDynRange - energy_db[f] < 0.0) kept.push_back(starts[f]);
  if (kept.empty()) {
    x->clear();
    y->clear();
    return;
  }
  const long out_len = static_cast<long>(kept.size() - 1) * kHop + kFrame;
  std::vector<double> xs(out_len, 0.0), ys(out_len, 0.0);
  for (size_t f = 0; f < kept.size(); ++f)
    for (int i = 0; i < kFrame; ++i) {
      xs[f * kHop + i] += w[i] * (*x)[kept[f] + i];
      ys[f * kHop + i] += w[i] * (*y)[kept[f] + i];
    }
  *x = std::move(xs);
  *y = std::move(ys);
}

// |STFT|^2 frames (kFrame window zero-padded to kFft), frames x bins.
std::vector<std::vector<double>> PowerSpectra(const std::vector<double>& x) {
  const std::vector<double> w = StoiWindow(kFrame);
  RealFft fft(kFft);
  std::vector<double> buf(kFft, 0.0);
  std::vector<std::complex<double>> spec(fft.num_bins());
  std::vector<std::vector<double>> frames;
  for (long i = 0; i + kFrame < static_cast<long>(x.size()); i += kHop) {
    for (int k = 0; k < kFrame; ++k) buf[k] = w[k] * x[i + k];
    fft.Forward(buf.data(), spec.data());
    std::vector<double> row(fft.num_bins());
    for (int k = 0; k < fft.num_bins(); ++k) row[k] = std::norm(spec[k]);
    frames.push_back(std::move(row));
  }
  return frames;
}

// One-third-octave band aggregation matrix (bins assigned by nearest edge).
std::vector<std::pair<int, int>> ThirdOctaveBands() {
  std::vector<std::pair<int, int>> bands(kBands);
  const int nbins = kFft / 2 + 1;
  std::vector<double> f(nbins);
  for (int i = 0; i < nbins; ++i)
    f[i] = static_cast<double>(kStoiFs) * i / kFft;
  auto nearest = [&](double target) {
    int best = 0;
    double best_d = 1e300;
    for (int i = 0; i < nbins; ++i) {
      const double d = (f[i] - target) * (f[i] - target);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  for (int b = 0; b < kBands; ++b) {
    const double lo = kMinFreq * std::pow(2.0, (2.0 * b - 1.0) / 6.0);
    const double hi = kMinFreq * std::pow(2.0, (2.0 * b + 1.0) / 6.0);
    bands[b] = {nearest(lo), nearest(hi)};
  }
  return bands;
}

// Band-energy envelope: bands x frames.
std::vector<std::vector<double>> BandEnvelope(
    const std::vector<std::vector<double>>& power) {
  const auto bands = ThirdOctaveBands();
  std::vector<std::vector<double>> env(kBands,
                                       std::vector<double>(power.size()));
  for (size_t t = 0; t < power.size(); ++t)
    for (int b = 0; b < kBands; ++b) {
      double acc = 0.0;
      for (int k = bands[b].first; k < bands[b].second; ++k)
        acc += power[t][k];
      env[b][t] = std::sqrt(acc);
    }
  return env;
}

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = a[i] - ma, y = b[i] - mb;
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  return dot / (std::sqrt(na) * std::sqrt(nb) + kEps);
}

double ClassicStoi(const std::vector<std::vector<double>>& xe,
                   const std::vector<std::vector<double>>& ye, long frames) {
  const double clip = std::pow(10.0, -kBetaDb / 20.0);
  double acc = 0.0;
  long count = 0;
  std::vector<double> xs(kSegment), ys(kSegment);
  for (long m = kSegment; m <= frames; ++m) {
    for (int b = 0; b < kBands; ++b) {
      double nx = 0.0, ny = 0.0;
      for (int i = 0; i < kSegment; ++i) {
        xs[i] = xe[b][m - kSegment + i];
        ys[i] = ye[b][m - kSegment + i];
        nx += xs[i] * xs[i];
        ny += ys[i] * ys[i];
      }
      const double scale = std::sqrt(nx) / (std::sqrt(ny) + kEps);
      for (int i = 0; i < kSegment; ++i) {
        const double clipped = std::min(ys[i] * scale, xs[i] * (1.0 + clip));
        ys[i] = clipped;
      }
      acc += Correlation(xs, ys);
      ++count;
    }
  }
  return acc / count;
}

double ExtendedStoi(const std::vector<std::vector<double>>& xe,
                    const std::vector<std::vector<double>>& ye, long frames) {
  double acc = 0.0;
  long segments = 0;
  Eigen::MatrixXd X(kBands, kSegment), Y(kBands, kSegment);
  for (long m = kSegment; m <= frames; ++m) {
    for (int b = 0; b < kBands; ++b)
      for (int i = 0; i < kSegment; ++i) {
        X(b, i) = xe[b][m - kSegment + i];
        Y(b, i) = ye[b][m - kSegment + i];
      }
    auto row_col_normalize = [](Eigen::MatrixXd& M) {
      for (int r = 0; r < M.rows(); ++r) {
        M.row(r).array() -= M.row(r).mean();
        M.row(r) /= (M.row(r).norm() + kEps);
      }
      for (int c = 0; c < M.cols(); ++c) {
        M.col(c).array() -= M.col(c).mean();
        M.col(c) /= (M.col(c).norm() + kEps);
      }
    };
    row_col_normalize(X);
    row_col_normalize(Y);
    acc += (X.array() * Y.array()).sum() / kSegment;
    ++segments;
  }
  return acc / segments;
}

}  // namespace

double Stoi(const std::vector<double>& estimate,
            const std::vector<double>& reference, int sample_rate,
            bool extended) {
  if (estimate.size() != reference.size() || estimate.empty())
    throw InputError("stoi: empty or mismatched signals");
  std::vector<double> x = reference, y = estimate;
  if (sample_rate == 16000) {
    x = ResamplePoly(x, 5, 8);
    y = ResamplePoly(y, 5, 8);
  } else if (sample_rate != kStoiFs) {
    throw InputError("stoi: expected 16 kHz or 10 kHz input");
  }

  RemoveSilentFrames(&x, &y);
  const auto xp = PowerSpectra(x);
  const auto yp = PowerSpectra(y);
  const long frames = static_cast<long>(xp.size());
  if (frames < kSegment)
    throw InputError(
        "stoi: fewer than 30 analysis frames survive silence removal "
        "(need roughly half a second of voiced content)");

  const auto xe = BandEnvelope(xp);
  const auto ye = BandEnvelope(yp);
  return extended ? ExtendedStoi(xe, ye, frames) : ClassicStoi(xe, ye, frames);
}

}  // namespace mcse
