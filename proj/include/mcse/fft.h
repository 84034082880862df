// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef MCSE_FFT_H_
#define MCSE_FFT_H_

#include <complex>
#include <memory>
#include <vector>

namespace mcse {

// Real-input FFT of a fixed even size, backed by FFTW. One instance owns its
// plans and buffers; instances are not shareable across threads, but separate
// instances may run concurrently (plan creation is serialized internally).
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // time[size] -> spectrum[size/2 + 1]
  void Forward(const double* time, std::complex<double>* spectrum);
  // spectrum[size/2 + 1] -> time[size], scaled by 1/size (exact inverse)
  void Inverse(const std::complex<double>* spectrum, double* time);

 private:
  struct Impl;
  int size_;
  std::unique_ptr<Impl> impl_;
};

// Linear convolution of two real signals via FFT, length a + b - 1.
std::vector<double> FftConvolve(const std::vector<double>& a,
                                const std::vector<double>& b);

}  // namespace mcse

#endif  // MCSE_FFT_H_
