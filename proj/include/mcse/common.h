// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_COMMON_H_
#define MCSE_COMMON_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcse {

// Error taxonomy used across the toolkit. Everything derives from Error so
// callers can catch broadly; the CLI maps Error -> exit 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParamError : public Error {  // invalid parameter / configuration value
 public:
  explicit ParamError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {  // inconsistent configuration
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class PlacementError : public Error {  // geometry outside the room
 public:
  explicit PlacementError(const std::string& msg) : Error(msg) {}
};

class SamplingError : public Error {  // rejection sampler exhausted
 public:
  explicit SamplingError(const std::string& msg) : Error(msg) {}
};

class FormatError : public Error {  // file/stream format violation
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

class ShapeError : public Error {  // tensor/matrix dimension mismatch
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

class InputError : public Error {  // degenerate or empty input signal
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {  // filesystem failure
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class ManifestError : public Error {  // dataset assets missing or inconsistent
 public:
  explicit ManifestError(const std::string& msg) : Error(msg) {}
};

constexpr int kDefaultSampleRate = 16000;
constexpr double kSpeedOfSound = 340.0;  // m/s, configurable where it matters

// Deterministic RNG wrapper. All randomness in the toolkit goes through this
// class so artifacts are reproducible bit-for-bit for a given seed,
// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  int UniformInt(int lo, int hi_inclusive) {
    // Rejection-free modulo bias is negligible for the ranges we use, but
    // keep it exact anyway.
    uint64_t range = static_cast<uint64_t>(hi_inclusive - lo) + 1;
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return lo + static_cast<int>(v % range);
  }

  // Standard normal via Box-Muller on the deterministic uniform.
  double Gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = Uniform();
    double u2 = Uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Derives an independent per-item stream from a batch seed, so work can be
  // fanned out across threads without changing the results.
  static Rng ForItem(uint64_t batch_seed, uint64_t item_index) {
    // splitmix64 of (seed, index); decorrelates consecutive indices.
    uint64_t z = batch_seed + 0x9e3779b97f4a7c15ULL * (item_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline double Db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace mcse

#endif  // MCSE_COMMON_H_
