#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "afc/error.hpp"
#include "afc/source/coincidence.hpp"
#include "afc/source/detector.hpp"
#include "afc/source/pair_source.hpp"

using namespace afc::source;

namespace {

PairSourceParams source(double mu, unsigned modes = 1) {
  PairSourceParams p;
  p.mu = mu;
  p.modes = modes;
  return p;
}

/// Pearson chi-square p-value of integer samples against a pmf, pooling the
/// tail into the last cell.
double chi_square_pvalue(const std::vector<std::uint32_t>& x, auto pmf) {
  std::map<std::uint32_t, double> obs;
  for (auto v : x) obs[v] += 1.0;
  const double n = static_cast<double>(x.size());
  double chi2 = 0.0, tail_p = 1.0, tail_obs = n;
  std::size_t cells = 0;
  for (std::uint32_t k = 0;; ++k) {
    const double p = pmf(k);
    if (n * (tail_p - p) < 20.0) break;
    const double o = obs.count(k) ? obs[k] : 0.0;
    chi2 += (o - n * p) * (o - n * p) / (n * p);
    tail_p -= p;
    tail_obs -= o;
    ++cells;
  }
  chi2 += (tail_obs - n * tail_p) * (tail_obs - n * tail_p) / (n * tail_p);
  return 1.0 - boost::math::cdf(boost::math::chi_squared(static_cast<double>(cells)), chi2);
}

std::vector<PhotonArrival> arrivals(const std::vector<double>& t) {
  std::vector<PhotonArrival> a;
  for (std::size_t i = 0; i < t.size(); ++i) a.push_back({t[i], static_cast<std::int64_t>(i), 1.0});
  return a;
}

std::vector<double> poisson_times(double rate, double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> g(rate);
  std::vector<double> t;
  for (double x = g(rng); x < duration; x += g(rng)) t.push_back(x);
  return t;
}

}  // namespace

TEST_SUITE("source") {

TEST_CASE("thermal pmf is normalized with mean mu") {
  for (unsigned m : {1u, 3u}) {
    double s = 0.0, mean = 0.0;
    for (unsigned n = 0; n < 200; ++n) {
      s += thermal_pmf(n, 0.5, m);
      mean += n * thermal_pmf(n, 0.5, m);
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(std::abs(mean - 0.5) < 1e-12);
  }
  CHECK(thermal_pmf(0, 0.0) == 1.0);
  CHECK(thermal_pmf(1, 0.2) == doctest::Approx(0.2 / (1.2 * 1.2)).epsilon(1e-14));
}

TEST_CASE("zero mean gives no pairs") {
  const auto n = sample_pair_emissions(source(0.0), 10000, 1);
  CHECK(std::all_of(n.begin(), n.end(), [](auto v) { return v == 0; }));
  CHECK(sample_pair_events(source(0.0), 10000, 1).empty());
}

TEST_CASE("sample mean at mu = 0.08 over 1e6 pulses") {
  const double mu = 0.08;
  const auto n = sample_pair_emissions(source(mu), 1000000, 7);
  const double mean = std::accumulate(n.begin(), n.end(), 0.0) / n.size();
  const double se = std::sqrt((mu + mu * mu) / n.size());
  CHECK(std::abs(mean - mu) <= 3 * se);
  CHECK(chi_square_pvalue(n, [&](std::uint32_t k) { return thermal_pmf(k, mu); }) > 0.01);
}

TEST_CASE("multimode statistics are negative binomial") {
  const auto n = sample_pair_emissions(source(0.6, 4), 200000, 9);
  CHECK(chi_square_pvalue(n, [](std::uint32_t k) { return thermal_pmf(k, 0.6, 4); }) > 0.01);
}

TEST_CASE("sparse events follow the same law as dense emissions") {
  for (unsigned modes : {1u, 3u}) {
    const std::uint64_t pulses = 2000000;
    const auto ev = sample_pair_events(source(0.2, modes), pulses, 21);
    std::vector<std::uint32_t> dense(pulses, 0);
    std::uint64_t last = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      CHECK(ev[i].pairs > 0);
      CHECK(ev[i].pulse < pulses);
      if (i > 0) CHECK(ev[i].pulse > last);
      last = ev[i].pulse;
      dense[ev[i].pulse] = ev[i].pairs;
    }
    CHECK(chi_square_pvalue(dense, [&](std::uint32_t k) { return thermal_pmf(k, 0.2, modes); }) > 0.01);
  }
}

TEST_CASE("bandwidth filter: identity at one, thermal closure under thinning") {
  const auto n = sample_pair_emissions(source(0.3), 300000, 3);
  CHECK(apply_bandwidth_filter(n, 1.0, 5) == n);
  const auto t = apply_bandwidth_filter(n, 0.8, 5);
  for (std::size_t i = 0; i < n.size(); ++i) REQUIRE(t[i] <= n[i]);
  CHECK(chi_square_pvalue(t, [](std::uint32_t k) { return thermal_pmf(k, 0.24); }) > 0.01);

  const auto ev = sample_pair_events(source(0.3), 300000, 3);
  const auto tev = apply_bandwidth_filter(ev, 0.8, 5);
  double before = 0, after = 0;
  for (const auto& e : ev) before += e.pairs;
  for (const auto& e : tev) {
    CHECK(e.pairs > 0);
    after += e.pairs;
  }
  CHECK(std::abs(after / before - 0.8) < 4 * std::sqrt(0.16 / before));
  CHECK_THROWS_AS(apply_bandwidth_filter(n, 1.5, 1), afc::Error);
}

TEST_CASE("spectral pass fraction and duty cycle") {
  CHECK(spectral_pass_fraction(10e9, 8e9) == doctest::Approx(0.8));
  CHECK(spectral_pass_fraction(5e9, 8e9) == 1.0);
  const DutyCycle d;
  CHECK(d.storage_fraction() == doctest::Approx(700.0 / 1500.0).epsilon(1e-15));
  DutyCycle bad;
  bad.storage = 0.0;
  CHECK_THROWS_AS(bad.validate(), afc::Error);
}

TEST_CASE("ideal detector reproduces its input exactly") {
  const std::vector<double> t{1e-9, 2.5e-9, 7e-9, 1e-6};
  const auto s = detect_stream(arrivals(t), DetectorParams::ideal(), 2e-6, 1, 3);
  CHECK(s.times == t);
  CHECK(s.channel == 3);
  CHECK(s.pulse_index == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("60 percent efficiency over 1e6 photons") {
  std::vector<double> t(1000000);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i * 1e-6;
  DetectorParams d{0.6, 0.0, 0.0, 0.0};
  const auto s = detect_stream(arrivals(t), d, 1.0 + 1e-6, 2);
  const double f = static_cast<double>(s.size()) / t.size();
  CHECK(std::abs(f - 0.6) <= 3 * std::sqrt(0.24 / t.size()));
}

TEST_CASE("600 ps FWHM jitter") {
  std::vector<double> t(200000);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1e-6 + i * 1e-7;
  const auto d = DetectorParams::from_fwhm(1.0, 600e-12, 0.0, 0.0);
  const auto s = detect_stream(arrivals(t), d, 1.0, 4);
  REQUIRE(s.size() == t.size());
  std::vector<double> dev(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) dev[i] = s.times[i] - t[static_cast<std::size_t>(s.pulse_index[i])];
  double m = 0.0, v = 0.0;
  for (double x : dev) m += x;
  m /= dev.size();
  for (double x : dev) v += (x - m) * (x - m);
  const double fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * std::sqrt(v / (dev.size() - 1));
  CHECK(std::abs(fwhm / 600e-12 - 1.0) < 0.05);
  CHECK(std::abs(m) < 5e-12);
  // Gaussian shape: fraction within one sigma
  const double sigma = fwhm_to_sigma(600e-12);
  const double inside = std::count_if(dev.begin(), dev.end(), [&](double x) { return std::abs(x) <= sigma; });
  CHECK(std::abs(inside / dev.size() - 0.682689) < 0.005);
}

TEST_CASE("dark counts, dead time and ordering") {
  DetectorParams d{0.6, 0.0, 2e4, 20e-9};
  const double duration = 5.0;
  const auto s = detect_stream({}, d, duration, 6);
  const double expected = 2e4 * duration;
  CHECK(std::abs(s.size() - expected) <= 4 * std::sqrt(expected));
  for (auto p : s.pulse_index) CHECK(p == -1);

  std::vector<double> burst;
  for (int i = 0; i < 1000; ++i) burst.push_back(1e-6 + i * 5e-9);
  const auto b = detect_stream(arrivals(burst), DetectorParams{1.0, 0.0, 0.0, 19e-9}, 1e-3, 1);
  CHECK(b.size() == 250);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b.times[i] - b.times[i - 1] >= 19e-9);
  DetectorParams bad{1.2, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), afc::Error);
}

TEST_CASE("identical seeds give identical streams") {
  const auto t = poisson_times(1e6, 1e-3, 8);
  const auto a = detect_stream(arrivals(t), DetectorParams::snspd(), 1e-3, 42);
  const auto b = detect_stream(arrivals(t), DetectorParams::snspd(), 1e-3, 42);
  CHECK(a.times == b.times);
  CHECK(a.pulse_index == b.pulse_index);
}

TEST_CASE("TDC histogram") {
  TimeTagStream one;
  one.times = {3e-9};
  one.pulse_index = {0};
  const double ref[] = {3e-9};
  const auto h = tdc_histogram(one, ref, 80e-12, -1e-9, 1e-9);
  CHECK(h.total() == 1);
  CHECK(h.counts[static_cast<std::size_t>(h.bin_index(0.0))] == 1);
  CHECK(std::abs(h.bin_center(static_cast<std::size_t>(h.bin_index(0.0)))) < 1e-15);

  const auto empty = tdc_histogram(TimeTagStream{}, ref, 80e-12, -1e-9, 1e-9);
  CHECK(empty.total() == 0);
  CHECK_FALSE(empty.counts.empty());

  // transmitted and recalled photon 5 ns apart
  TimeTagStream two;
  std::vector<double> refs;
  for (int i = 0; i < 1000; ++i) {
    const double t0 = i * 12.5e-9;
    refs.push_back(t0);
    two.times.push_back(t0 + (i % 3 == 0 ? 5e-9 : 0.0));
    two.pulse_index.push_back(i);
  }
  const auto hh = tdc_histogram(two, refs, 80e-12, -2e-9, 8e-9);
  CHECK(hh.window_sum(0.0, 5) == 666);
  CHECK(hh.window_sum(5e-9, 5) == 334);
  CHECK(std::abs(hh.centroid(4e-9, 6e-9) - hh.centroid(-1e-9, 1e-9) - 5e-9) <= 40e-12);
  CHECK_THROWS_AS(tdc_histogram(two, refs, 0.0, 0.0, 1.0), afc::Error);
}

TEST_CASE("coincidences of identical streams") {
  TimeTagStream s;
  s.times = poisson_times(1e5, 0.1, 2);
  s.pulse_index.assign(s.times.size(), 0);
  const auto c = coincide(s, s, 1e-9, 0.0);
  CHECK(c.n_si == c.n_s);
  CHECK(c.n_s == c.n_i);
  CHECK_THROWS_AS(coincide(s, s, 0.0, 0.0), afc::Error);
}

TEST_CASE("accidental rate of independent Poisson streams") {
  const double rs = 2e5, ri = 3e5, w = 4e-9, T = 2.0;
  TimeTagStream a, b;
  a.times = poisson_times(ri, T, 10);
  b.times = poisson_times(rs, T, 11);
  a.pulse_index.assign(a.size(), -1);
  b.pulse_index.assign(b.size(), -1);
  const auto c = coincide(a, b, w, 0.0);
  const double expected = rs * ri * w * T;
  CHECK(std::abs(c.n_si - expected) <= 3 * std::sqrt(expected));
}

TEST_CASE("gated counting only sees the slot around the expected delay") {
  TimeTagStream h, s;
  for (int i = 0; i < 100; ++i) {
    h.times.push_back(i * 12.5e-9);
    s.times.push_back(i * 12.5e-9 + 5e-9);
    s.times.push_back(i * 12.5e-9 + 9e-9);
  }
  h.pulse_index.assign(h.size(), 0);
  s.pulse_index.assign(s.size(), 0);
  const auto c = coincide(h, s, 1e-9, 5e-9, {12.5e-9, 100});
  CHECK(c.n_s == 100);
  CHECK(c.n_si == 100);
  CHECK(c.n_pulses == 100);
}

}
