// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "afc/simd/kernels.hpp"

namespace afc::simd {

const KernelTable* avx2_kernels_impl();

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void complex_multiply_avx2(const std::complex<double>* a, const std::complex<double>* b,
                           std::complex<double>* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);
    const __m256d a_swap = _mm256_permute_pd(va, 0x5);
    const __m256d r = _mm256_fmaddsub_pd(va, b_re, _mm256_mul_pd(a_swap, b_im));
    _mm256_storeu_pd(po + 2 * k, r);
  }
  for (; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    out[k] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

double sum_norm_avx2(const std::complex<double>* a, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(a);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= m; k += 8) {
    const __m256d x0 = _mm256_loadu_pd(p + k);
    const __m256d x1 = _mm256_loadu_pd(p + k + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < m; ++k) acc += p[k] * p[k];
  return acc;
}

PhasorSum phasor_step_avx2(const double* w, double* re, double* im, const double* rot_re,
                           const double* rot_im, std::size_t n) {
  __m256d sre = _mm256_setzero_pd();
  __m256d sim = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d vw = _mm256_loadu_pd(w + j);
    const __m256d vr = _mm256_loadu_pd(re + j);
    const __m256d vi = _mm256_loadu_pd(im + j);
    const __m256d cr = _mm256_loadu_pd(rot_re + j);
    const __m256d ci = _mm256_loadu_pd(rot_im + j);
    sre = _mm256_fmadd_pd(vw, vr, sre);
    sim = _mm256_fmadd_pd(vw, vi, sim);
    const __m256d nr = _mm256_fmsub_pd(vr, cr, _mm256_mul_pd(vi, ci));
    const __m256d ni = _mm256_fmadd_pd(vr, ci, _mm256_mul_pd(vi, cr));
    _mm256_storeu_pd(re + j, nr);
    _mm256_storeu_pd(im + j, ni);
  }
  PhasorSum s{hsum(sre), hsum(sim)};
  for (; j < n; ++j) {
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

const KernelTable* avx2_kernels_impl() {
  static const KernelTable table{Isa::avx2, &complex_multiply_avx2, &sum_norm_avx2,
                                 &phasor_step_avx2};
  return &table;
}

}  // namespace afc::simd
