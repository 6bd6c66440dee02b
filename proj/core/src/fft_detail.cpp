#include "fft_detail.hpp"

#include <algorithm>

namespace kappadyn::detail {

namespace {

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftWorkspace::FftWorkspace(int nx, int np) : nx_(nx), np_(np) {
  buf_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * size()));
  // Axis p: nx contiguous lines of length np.
  fwd_p_ = fftw_plan_many_dft(1, &np_, nx_, as_fftw(buf_), nullptr, 1, np_, as_fftw(buf_),
                              nullptr, 1, np_, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_p_ = fftw_plan_many_dft(1, &np_, nx_, as_fftw(buf_), nullptr, 1, np_, as_fftw(buf_),
                              nullptr, 1, np_, FFTW_BACKWARD, FFTW_ESTIMATE);
  // Axis x: np interleaved lines of length nx, stride np.
  fwd_x_ = fftw_plan_many_dft(1, &nx_, np_, as_fftw(buf_), nullptr, np_, 1, as_fftw(buf_),
                              nullptr, np_, 1, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_x_ = fftw_plan_many_dft(1, &nx_, np_, as_fftw(buf_), nullptr, np_, 1, as_fftw(buf_),
                              nullptr, np_, 1, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftWorkspace::~FftWorkspace() {
  fftw_destroy_plan(fwd_x_);
  fftw_destroy_plan(bwd_x_);
  fftw_destroy_plan(fwd_p_);
  fftw_destroy_plan(bwd_p_);
  fftw_free(buf_);
}

void FftWorkspace::load(const cplx* src) { std::copy(src, src + size(), buf_); }

void FftWorkspace::store(cplx* dst) const { std::copy(buf_, buf_ + size(), dst); }

void FftWorkspace::forward_x() { fftw_execute(fwd_x_); }
void FftWorkspace::backward_x() { fftw_execute(bwd_x_); }
void FftWorkspace::forward_p() { fftw_execute(fwd_p_); }
void FftWorkspace::backward_p() { fftw_execute(bwd_p_); }

}  // namespace kappadyn::detail
