#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace afc::pol {

using cplx = std::complex<double>;

/// |psi> = h|H> + v|V>. Global phases are never compared; use overlap().
struct JonesVector {
  cplx h{1.0, 0.0};
  cplx v{0.0, 0.0};

  double norm2() const { return std::norm(h) + std::norm(v); }
  JonesVector normalized() const;
  Eigen::Vector2cd vec() const { return {h, v}; }
  static JonesVector from(const Eigen::Vector2cd& x) { return {x(0), x(1)}; }
};

enum class MatrixKind { unitary, diattenuator };

struct JonesMatrix {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  MatrixKind kind = MatrixKind::unitary;

  JonesVector apply(const JonesVector& x) const { return JonesVector::from(m * x.vec()); }
  JonesMatrix then(const JonesMatrix& next) const;  // next * this
  JonesMatrix adjoint() const { return {m.adjoint(), kind}; }
};

/// cos(theta)|H> + exp(i phi) sin(theta)|V>
JonesVector prepare_qubit(double theta, double phi);

JonesVector horizontal();
JonesVector vertical();
JonesVector diagonal();      // (H + V)/sqrt2
JonesVector antidiagonal();  // (H - V)/sqrt2
JonesVector right_circular();  // (H + iV)/sqrt2
JonesVector left_circular();   // (H - iV)/sqrt2

/// State orthogonal to x (same norm).
JonesVector orthogonal(const JonesVector& x);

/// |<a|b>|^2
double overlap(const JonesVector& a, const JonesVector& b);

struct Stokes {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
};
Stokes stokes(const JonesVector& x);

enum class WaveplateKind { half, quarter };

/// Linear retarder R(a) diag(1, e^{i retardance}) R(-a).
JonesMatrix retarder(double retardance, double fast_axis_angle);
JonesMatrix waveplate(WaveplateKind kind, double fast_axis_angle);

/// Waveplate angles (radians) such that QWP(quarter) * HWP(half) |H> is the
/// target up to global phase.
struct WaveplateSetting {
  double half = 0.0;
  double quarter = 0.0;
};
WaveplateSetting waveplate_setting_for(const JonesVector& target);

struct PbsOutcome {
  double p_h = 0.0;
  double p_v = 0.0;
};

/// Born-rule split at a polarizing beam splitter. Errors: unnormalized-state
/// (|norm^2 - 1| > 1e-9).
PbsOutcome pbs_project(const JonesVector& state);

/// Unitary that maps plus_state onto |H> (and its orthogonal partner onto
/// |V>), so that a PBS behind it projects onto {plus_state, plus_state_perp}.
JonesMatrix analyzer_rotation(const JonesVector& plus_state);

/// Haar-random U(2) elements, deterministic in seed.
std::vector<JonesMatrix> scrambler_sample(std::uint64_t seed, std::size_t n);

/// 1 - depth * |<axis_perp|state>|^2 for a normalized state.
double detector_pol_efficiency(const JonesVector& state, const JonesVector& axis, double depth);

bool is_unitary(const JonesMatrix& m, double tol = 1e-12);

}  // namespace afc::pol
