#include "afc/analysis/visibility.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "afc/error.hpp"

namespace afc::analysis {

double VisibilityFit::predict(double x) const {
  return mean + amp_c * std::cos(2.0 * x) + amp_s * std::sin(2.0 * x);
}

namespace {

std::size_t distinct_settings(std::span<const double> x) {
  std::vector<double> r;
  r.reserve(x.size());
  for (double v : x) {
    double m = std::fmod(v, std::numbers::pi);
    if (m < 0.0) m += std::numbers::pi;
    r.push_back(m);
  }
  std::sort(r.begin(), r.end());
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i == 0 || r[i] - r[i - 1] > 1e-9) ++n;
  }
  // 0 and pi are the same setting
  if (n > 1 && std::numbers::pi - r.back() + r.front() <= 1e-9) --n;
  return n;
}

}  // namespace

VisibilityFit fit_visibility(std::span<const double> settings, std::span<const double> probabilities,
                             std::span<const double> errors) {
  const std::size_t n = settings.size();
  if (probabilities.size() != n || errors.size() != n) {
    throw Error(Errc::invalid_argument, "settings, probabilities and errors differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(probabilities[i])) {
      throw Error(Errc::invalid_argument, "errors must be positive and data finite");
    }
  }
  if (distinct_settings(settings) < 4) {
    throw Error(Errc::degenerate_design, "need at least four distinct settings");
  }

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(2.0 * settings[i]);
    a(i, 2) = std::sin(2.0 * settings[i]);
    y(i) = probabilities[i];
    w(i) = 1.0 / (errors[i] * errors[i]);
  }
  const Eigen::Matrix3d normal = a.transpose() * w.asDiagonal() * a;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (lu.rank() < 3) throw Error(Errc::degenerate_design, "singular normal matrix");
  const Eigen::Matrix3d cov = lu.inverse();
  const Eigen::Vector3d beta = cov * (a.transpose() * w.asDiagonal() * y);

  VisibilityFit f;
  f.mean = beta(0);
  f.amp_c = beta(1);
  f.amp_s = beta(2);
  const double r = std::hypot(f.amp_c, f.amp_s);
  f.visibility_raw = f.mean != 0.0 ? r / f.mean : 0.0;
  f.visibility = std::clamp(f.visibility_raw, 0.0, 1.0);
  f.phase = std::atan2(f.amp_s, f.amp_c);
  f.se_mean = std::sqrt(cov(0, 0));

  if (r > 0.0 && f.mean != 0.0) {
    const Eigen::Vector3d g(-r / (f.mean * f.mean), f.amp_c / (r * f.mean), f.amp_s / (r * f.mean));
    f.se_visibility = std::sqrt(std::max(0.0, g.dot(cov * g)));
    const Eigen::Vector3d gp(0.0, -f.amp_s / (r * r), f.amp_c / (r * r));
    f.se_phase = std::sqrt(std::max(0.0, gp.dot(cov * gp)));
  } else {
    f.se_visibility = f.mean != 0.0 ? std::sqrt(0.5 * (cov(1, 1) + cov(2, 2))) / std::abs(f.mean) : 0.0;
    f.se_phase = std::numbers::pi;
  }

  f.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.residuals[i] = probabilities[i] - f.predict(settings[i]);
    f.chi2 += f.residuals[i] * f.residuals[i] * w(static_cast<Eigen::Index>(i));
  }
  f.dof = n - 3;
  return f;
}

double poisson_probability_error(std::uint64_t k, std::uint64_t total) {
  if (total == 0) throw Error(Errc::zero_basis_total, "no counts in projection pair");
  const double kk = std::max<double>(1.0, static_cast<double>(k));
  return std::sqrt(kk) / static_cast<double>(total);
}

double fidelity_from_visibilities(double v_h, double v_v) {
  if (!(v_h >= 0.0 && v_h <= 1.0 && v_v >= 0.0 && v_v <= 1.0)) {
    throw Error(Errc::invalid_argument, "visibilities must lie in [0, 1]");
  }
  return (2.0 + v_h + v_v) / 4.0;
}

double fidelity_error_from_visibilities(double se_h, double se_v) { return 0.25 * std::hypot(se_h, se_v); }

}  // namespace afc::analysis
