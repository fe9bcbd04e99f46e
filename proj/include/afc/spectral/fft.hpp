#pragma once

#include <complex>
#include <vector>

namespace afc::spectral {

enum class FftDirection {
  forward,   // X_k = sum_n x_n exp(-2 pi i k n / N)
  backward,  // x_n = sum_k X_k exp(+2 pi i k n / N), unnormalized
};

/// In-place complex DFT backed by FFTW. No normalization is applied.
void fft_inplace(std::vector<std::complex<double>>& data, FftDirection direction);

}  // namespace afc::spectral
