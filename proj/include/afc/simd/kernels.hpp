#pragma once

// Data-parallel inner loops shared by the spectral engine and the Dicke
// oracle. Each kernel has a scalar reference implementation and, where the
// build and the CPU allow it, an AVX2/FMA variant. The active table is chosen
// once at startup; AFC_SIMD=scalar in the environment forces the reference
// path.

#include <complex>
#include <cstddef>
#include <string_view>

namespace afc::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct PhasorSum {
  double re = 0.0;
  double im = 0.0;
};

struct KernelTable {
  Isa isa;

  // out[k] = a[k] * b[k]. out may alias a.
  void (*complex_multiply)(const std::complex<double>* a, const std::complex<double>* b,
                           std::complex<double>* out, std::size_t n);

  // sum_k |a[k]|^2
  double (*sum_norm)(const std::complex<double>* a, std::size_t n);

  // Returns sum_j w[j] * (re[j] + i im[j]) and then advances every phasor by
  // its rotation: (re + i im) *= (rot_re + i rot_im).
  PhasorSum (*phasor_step)(const double* w, double* re, double* im, const double* rot_re,
                           const double* rot_im, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

/// Best table for this machine (honours AFC_SIMD=scalar).
const KernelTable& active_kernels();

/// Override the active table. Throws afc::Error if the ISA is unavailable.
void set_active_isa(Isa isa);

}  // namespace afc::simd
