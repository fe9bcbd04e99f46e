#include "afc/polarization/jones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "afc/error.hpp"

namespace afc::pol {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

JonesVector JonesVector::normalized() const {
  const double n = std::sqrt(norm2());
  if (!(n > 0.0)) throw Error(Errc::unnormalized_state, "zero Jones vector");
  return {h / n, v / n};
}

JonesMatrix JonesMatrix::then(const JonesMatrix& next) const {
  const MatrixKind k = (kind == MatrixKind::unitary && next.kind == MatrixKind::unitary)
                           ? MatrixKind::unitary
                           : MatrixKind::diattenuator;
  return {next.m * m, k};
}

JonesVector prepare_qubit(double theta, double phi) {
  return {cplx(std::cos(theta), 0.0), std::polar(std::sin(theta), phi)};
}

JonesVector horizontal() { return {1.0, 0.0}; }
JonesVector vertical() { return {0.0, 1.0}; }
JonesVector diagonal() { return {kInvSqrt2, kInvSqrt2}; }
JonesVector antidiagonal() { return {kInvSqrt2, -kInvSqrt2}; }
JonesVector right_circular() { return {kInvSqrt2, cplx(0.0, kInvSqrt2)}; }
JonesVector left_circular() { return {kInvSqrt2, cplx(0.0, -kInvSqrt2)}; }

JonesVector orthogonal(const JonesVector& x) { return {-std::conj(x.v), std::conj(x.h)}; }

double overlap(const JonesVector& a, const JonesVector& b) {
  return std::norm(std::conj(a.h) * b.h + std::conj(a.v) * b.v);
}

Stokes stokes(const JonesVector& x) {
  const cplx c = std::conj(x.h) * x.v;
  return {std::norm(x.h) - std::norm(x.v), 2.0 * c.real(), 2.0 * c.imag()};
}

JonesMatrix retarder(double retardance, double fast_axis_angle) {
  const double c = std::cos(fast_axis_angle), s = std::sin(fast_axis_angle);
  Eigen::Matrix2cd rot;
  rot << c, -s, s, c;
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, retardance);
  return {rot * d * rot.adjoint(), MatrixKind::unitary};
}

JonesMatrix waveplate(WaveplateKind kind, double fast_axis_angle) {
  const double retardance = kind == WaveplateKind::half ? std::numbers::pi : 0.5 * std::numbers::pi;
  return retarder(retardance, fast_axis_angle);
}

WaveplateSetting waveplate_setting_for(const JonesVector& target) {
  const JonesVector t = target.normalized();
  const Stokes s = stokes(t);
  const double orientation = 0.5 * std::atan2(s.s2, s.s1);
  const double ellipticity = 0.5 * std::asin(std::clamp(s.s3, -1.0, 1.0));
  WaveplateSetting best;
  double best_overlap = -1.0;
  for (double sign : {1.0, -1.0}) {
    const WaveplateSetting cand{0.5 * (orientation + sign * ellipticity), orientation};
    const JonesVector out = waveplate(WaveplateKind::quarter, cand.quarter)
                                .apply(waveplate(WaveplateKind::half, cand.half).apply(horizontal()));
    const double ov = overlap(out, t);
    if (ov > best_overlap) {
      best_overlap = ov;
      best = cand;
    }
  }
  return best;
}

PbsOutcome pbs_project(const JonesVector& state) {
  const double n2 = state.norm2();
  if (std::abs(n2 - 1.0) > 1e-9) {
    throw Error(Errc::unnormalized_state, "PBS input must be normalized");
  }
  return {std::norm(state.h), std::norm(state.v)};
}

JonesMatrix analyzer_rotation(const JonesVector& plus_state) {
  const JonesVector p = plus_state.normalized();
  const JonesVector q = orthogonal(p);
  Eigen::Matrix2cd u;
  u.row(0) = p.vec().adjoint();
  u.row(1) = q.vec().adjoint();
  return {u, MatrixKind::unitary};
}

std::vector<JonesMatrix> scrambler_sample(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<JonesMatrix> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    // uniform point on S^3 -> Haar SU(2), times a uniform U(1) phase
    double a = gauss(rng), b = gauss(rng), c = gauss(rng), d = gauss(rng);
    const double r = std::sqrt(a * a + b * b + c * c + d * d);
    a /= r;
    b /= r;
    c /= r;
    d /= r;
    Eigen::Matrix2cd u;
    u << cplx(a, b), cplx(c, d), cplx(-c, d), cplx(a, -b);
    out.push_back({std::polar(1.0, phase(rng)) * u, MatrixKind::unitary});
  }
  return out;
}

double detector_pol_efficiency(const JonesVector& state, const JonesVector& axis, double depth) {
  if (!(depth >= 0.0 && depth < 1.0)) {
    throw Error(Errc::invalid_argument, "polarization dependence depth must lie in [0, 1)");
  }
  const JonesVector s = state.normalized();
  const JonesVector perp = orthogonal(axis.normalized());
  return 1.0 - depth * overlap(perp, s);
}

bool is_unitary(const JonesMatrix& m, double tol) {
  return (m.m.adjoint() * m.m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace afc::pol
