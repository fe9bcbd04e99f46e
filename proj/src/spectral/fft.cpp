#include "afc/spectral/fft.hpp"

#include <fftw3.h>

#include <memory>

#include "afc/error.hpp"

namespace afc::spectral {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, FftDirection direction) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  // FFTW_ESTIMATE leaves the array untouched while planning and gives a
  // reproducible plan, which keeps sweeps bit-for-bit deterministic.
  Plan plan(fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED));
  if (!plan) throw Error(Errc::invalid_argument, "FFTW could not create a plan");
  fftw_execute(plan.get());
}

}  // namespace afc::spectral
