#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace kappadyn::detail {

using cplx = std::complex<double>;

// In-place batched 1-D transforms over a row-major nx*np complex buffer.
// Axis x strides by np, axis p is contiguous. Plans use FFTW_ESTIMATE only:
// measured planning would make results depend on runtime timings and break
// byte-level determinism. Backward transforms are unnormalized; callers fold
// 1/n into their multiplier tables.
class FftWorkspace {
 public:
  FftWorkspace(int nx, int np);
  ~FftWorkspace();
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  cplx* data() { return buf_; }
  const cplx* data() const { return buf_; }
  int nx() const { return nx_; }
  int np() const { return np_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * np_; }

  void load(const cplx* src);
  void store(cplx* dst) const;

  void forward_x();
  void backward_x();
  void forward_p();
  void backward_p();

 private:
  int nx_;
  int np_;
  cplx* buf_;
  fftw_plan fwd_x_;
  fftw_plan bwd_x_;
  fftw_plan fwd_p_;
  fftw_plan bwd_p_;
};

}  // namespace kappadyn::detail
