#include "afc/analysis/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "afc/error.hpp"

namespace afc::analysis {

using cplx = std::complex<double>;

DensityMatrix density_from_stokes(double s1, double s2, double s3) {
  DensityMatrix r;
  r << cplx(1.0 + s1, 0.0), cplx(s2, -s3), cplx(s2, s3), cplx(1.0 - s1, 0.0);
  return 0.5 * r;
}

DensityMatrix pure_density(const pol::JonesVector& psi) {
  const Eigen::Vector2cd v = psi.normalized().vec();
  return v * v.adjoint();
}

StokesEstimate stokes_reconstruct(const TomographyCounts& c) {
  auto component = [](const BasisCounts& b, const char* name) {
    const double t = b.total();
    if (!(t > 0.0)) throw Error(Errc::zero_basis_total, std::string("no counts in basis ") + name);
    return (b.plus - b.minus) / t;
  };
  StokesEstimate s;
  s.s1 = component(c.hv, "H/V");
  s.s2 = component(c.da, "D/A");
  s.s3 = component(c.rl, "R/L");
  s.rho = density_from_stokes(s.s1, s.s2, s.s3);
  return s;
}

DensityMatrix mle_project(const DensityMatrix& rho_lin) {
  const DensityMatrix h = 0.5 * (rho_lin + rho_lin.adjoint());
  const Eigen::SelfAdjointEigenSolver<DensityMatrix> es(h);
  Eigen::Vector2d lam = es.eigenvalues();  // ascending
  const double tr = lam.sum();
  // water-filling on the sorted spectrum: zero the smallest eigenvalues while
  // spreading their deficit over the rest
  double acc = 0.0;
  int i = 0;
  const int n = 2;
  for (; i < n; ++i) {
    const double share = acc / static_cast<double>(n - i);
    if (lam(i) + share >= 0.0) break;
    acc += lam(i);
    lam(i) = 0.0;
  }
  const double share = acc / static_cast<double>(n - i);
  for (int j = i; j < n; ++j) lam(j) += share;
  lam /= (tr != 0.0 ? lam.sum() : 1.0);
  DensityMatrix out = es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

DensityMatrix clamp_baseline(const StokesEstimate& s) {
  double a = std::clamp(s.s1, -1.0, 1.0);
  double b = std::clamp(s.s2, -1.0, 1.0);
  double c = std::clamp(s.s3, -1.0, 1.0);
  const double r = std::sqrt(a * a + b * b + c * c);
  if (r > 1.0) {
    a /= r;
    b /= r;
    c /= r;
  }
  return density_from_stokes(a, b, c);
}

double state_fidelity(const DensityMatrix& rho, const pol::JonesVector& target) {
  const Eigen::Vector2cd v = target.normalized().vec();
  return (v.adjoint() * rho * v)(0, 0).real();
}

bool is_density_matrix(const DensityMatrix& rho, double tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tol) return false;
  const Eigen::SelfAdjointEigenSolver<DensityMatrix> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff() >= -tol;
}

TomographyCounts expected_counts(const DensityMatrix& rho, double n_per_basis) {
  auto split = [&](const pol::JonesVector& plus) {
    const double p = std::clamp(state_fidelity(rho, plus), 0.0, 1.0);
    return BasisCounts{n_per_basis * p, n_per_basis * (1.0 - p)};
  };
  return {split(pol::horizontal()), split(pol::diagonal()), split(pol::right_circular())};
}

BootstrapResult bootstrap_fidelity(const TomographyCounts& counts, const pol::JonesVector& target,
                                   std::size_t n_resamples, std::uint64_t seed) {
  if (n_resamples < 2) throw Error(Errc::invalid_argument, "bootstrap needs at least two resamples");
  std::mt19937_64 rng(seed);
  auto redraw = [&](const BasisCounts& b) {
    const auto n = static_cast<std::uint64_t>(std::llround(b.total()));
    if (n == 0) throw Error(Errc::zero_basis_total, "empty basis in bootstrap");
    std::binomial_distribution<std::uint64_t> d(n, std::clamp(b.plus / b.total(), 0.0, 1.0));
    const double k = static_cast<double>(d(rng));
    return BasisCounts{k, static_cast<double>(n) - k};
  };
  double sum = 0.0, sum2 = 0.0;
  std::size_t used = 0;
  for (std::size_t r = 0; r < n_resamples; ++r) {
    const TomographyCounts c{redraw(counts.hv), redraw(counts.da), redraw(counts.rl)};
    const double f = state_fidelity(mle_project(stokes_reconstruct(c).rho), target);
    sum += f;
    sum2 += f * f;
    ++used;
  }
  const double n = static_cast<double>(used);
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)))};
}

}  // namespace afc::analysis
