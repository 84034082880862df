// Copyright 2026 The mcse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mcse/fft.h"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "mcse/common.h"

namespace mcse {

namespace {
// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  double* real_buf = nullptr;
  fftw_complex* cplx_buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(int size) : size_(size), impl_(new Impl) {
  if (size < 2 || (size & 1)) throw ParamError("fft: size must be even >= 2");
  impl_->real_buf = fftw_alloc_real(size);
  impl_->cplx_buf = fftw_alloc_complex(size / 2 + 1);
  std::lock_guard<std::mutex> lock(PlannerMutex());
  impl_->fwd = fftw_plan_dft_r2c_1d(size, impl_->real_buf, impl_->cplx_buf,
                                    FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(size, impl_->cplx_buf, impl_->real_buf,
                                    FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw Error("fft: plan creation failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real_buf);
  fftw_free(impl_->cplx_buf);
}

void RealFft::Forward(const double* time, std::complex<double>* spectrum) {
  std::memcpy(impl_->real_buf, time, sizeof(double) * size_);
  fftw_execute(impl_->fwd);
  std::memcpy(spectrum, impl_->cplx_buf,
              sizeof(fftw_complex) * (size_ / 2 + 1));
}

void RealFft::Inverse(const std::complex<double>* spectrum, double* time) {
  std::memcpy(impl_->cplx_buf, spectrum,
              sizeof(fftw_complex) * (size_ / 2 + 1));
  fftw_execute(impl_->inv);
  const double scale = 1.0 / size_;
  for (int i = 0; i < size_; ++i) time[i] = impl_->real_buf[i] * scale;
}

std::vector<double> FftConvolve(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InputError("convolve: empty input");
  const size_t out_len = a.size() + b.size() - 1;
  size_t n = 2;
  while (n < out_len) n <<= 1;
  RealFft fft(static_cast<int>(n));

  std::vector<double> ta(n, 0.0), tb(n, 0.0);
  std::copy(a.begin(), a.end(), ta.begin());
  std::copy(b.begin(), b.end(), tb.begin());
  std::vector<std::complex<double>> fa(fft.num_bins()), fb(fft.num_bins());
  fft.Forward(ta.data(), fa.data());
  fft.Forward(tb.data(), fb.data());
  for (int k = 0; k < fft.num_bins(); ++k) fa[k] *= fb[k];
  std::vector<double> out_full(n);
  fft.Inverse(fa.data(), out_full.data());
  out_full.resize(out_len);
  return out_full;
}

}  // namespace mcse
