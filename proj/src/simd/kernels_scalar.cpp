#include "afc/simd/kernels.hpp"

namespace afc::simd {
namespace {

void complex_multiply_scalar(const std::complex<double>* a, const std::complex<double>* b,
                             std::complex<double>* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    out[k] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

double sum_norm_scalar(const std::complex<double>* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  }
  return acc;
}

PhasorSum phasor_step_scalar(const double* w, double* re, double* im, const double* rot_re,
                             const double* rot_im, std::size_t n) {
  PhasorSum s;
  for (std::size_t j = 0; j < n; ++j) {
    s.re += w[j] * re[j];
    s.im += w[j] * im[j];
    const double r = re[j] * rot_re[j] - im[j] * rot_im[j];
    const double i = re[j] * rot_im[j] + im[j] * rot_re[j];
    re[j] = r;
    im[j] = i;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, &complex_multiply_scalar, &sum_norm_scalar,
                                 &phasor_step_scalar};
  return table;
}

}  // namespace afc::simd
