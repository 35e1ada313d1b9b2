#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "errors.hpp"
#include "linear.hpp"

using namespace riglid;

namespace {

double maxdiff(const Vec& a, const Vec& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SurfaceState random_band_limited(const SpectralGrid& g, unsigned seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec a(g.nhalf()), b(g.nhalf());
  for (int k = 1; k <= kmax; ++k) {
    a[k] = cplx(nd(rng), nd(rng)) / double(k);
    b[k] = cplx(nd(rng), nd(rng)) / double(k);
  }
  return {g.inverse(a), g.inverse(b)};
}

}  // namespace

TEST_CASE("single mode closed form") {
  const SpectralGrid g(2 * M_PI, 32);
  const double mu = 0.5, eps = 0.1, t = 0.7;
  for (int k : {1, 3, 7}) {
    const Vec z0 = sample_fn(g, [&](double x) { return std::cos(k * x); });
    const SurfaceState s = propagate_linear({z0, Vec(g.size(), 0.0)}, t, eps, mu, g);
    // omega from the dispersion relation, written out independently
    const double om = std::sqrt(k * std::tanh(std::sqrt(mu) * k) / std::sqrt(mu)), th = om * t / eps;
    for (int i = 0; i < g.size(); ++i) {
      CHECK(s.zeta[i] == doctest::Approx(z0[i] * std::cos(th)).scale(1).epsilon(1e-13));
      CHECK(s.psi[i] == doctest::Approx(-z0[i] * std::sin(th) / om).scale(1).epsilon(1e-13));
    }
  }
}

TEST_CASE("identity at t = 0 and the zero mode") {
  const SpectralGrid g(10, 64);
  const SurfaceState s0 = random_band_limited(g, 3, 10);
  const SurfaceState s = propagate_linear(s0, 0.0, 0.1, 0.5, g);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(s.zeta[i] - s0.zeta[i]) <= 1e-15 * sup_norm(s0.zeta) * 8);
    CHECK(std::abs(s.psi[i] - s0.psi[i]) <= 1e-15 * sup_norm(s0.psi) * 8);
  }
  // constant data: zeta stays a, psi drifts by -(t/eps) a
  const SurfaceState c = propagate_linear({Vec(64, 2.0), Vec(64, 1.0)}, 0.3, 0.1, 0.5, g);
  for (int i = 0; i < 64; ++i) {
    CHECK(c.zeta[i] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.psi[i] == doctest::Approx(1.0 - 3.0 * 2.0).epsilon(1e-13));
  }
}

TEST_CASE("group property and reversibility") {
  const SpectralGrid g(30, 128);
  const SurfaceState s0 = random_band_limited(g, 5, 30);
  const LinearPropagator lp(g, 0.5);
  const SurfaceState a = lp.apply(lp.apply(s0, 0.4, 0.05), 1.1, 0.05), b = lp.apply(s0, 1.5, 0.05);
  CHECK(maxdiff(a.zeta, b.zeta) < 1e-12);
  CHECK(maxdiff(a.psi, b.psi) < 1e-12);
  const SurfaceState r = lp.apply(lp.apply(s0, 2.0, 0.05), -2.0, 0.05);
  CHECK(maxdiff(r.zeta, s0.zeta) < 1e-12);
  CHECK(maxdiff(r.psi, s0.psi) < 1e-12);
}

TEST_CASE("linear hamiltonian") {
  const SpectralGrid g(2 * M_PI, 32);
  CHECK(linear_hamiltonian({Vec(32, 0.0), Vec(32, 0.0)}, 0.5, g) == 0.0);
  const Vec c = sample_fn(g, [](double x) { return std::cos(x); });
  CHECK(linear_hamiltonian({c, Vec(32, 0.0)}, 0.5, g) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  const SpectralGrid h(40, 256);
  const SurfaceState s0 = random_band_limited(h, 9, 40);
  const double H0 = linear_hamiltonian(s0, 0.5, h);
  for (double t : {0.5, 3.0, 10.0})
    CHECK(std::abs(linear_hamiltonian(propagate_linear(s0, t, 0.1, 0.5, h), 0.5, h) - H0) <= 1e-12 * H0);
}

TEST_CASE("wave equation residual") {
  const SpectralGrid g(40, 256);
  const Vec c = sample_fn(g, [&](double x) { return std::cos(2 * M_PI * 3 * x / 40); });
  CHECK(wave_equation_residual({c, Vec(256, 0.0)}, 0.8, 0.1, 0.5, g) < 1e-12);
  const SurfaceState s = random_band_limited(g, 21, 60);
  CHECK(wave_equation_residual(s, 0.8, 0.1, 0.5, g) <= 1e-10 * l2_norm(s.zeta, g));
  CHECK(wave_equation_residual({Vec(256, 0.0), s.psi}, 0.8, 0.1, 0.5, g) < 1e-10);
}

TEST_CASE("oscillatory integral") {
  auto bump = [](double x) {
    if (x <= 1 || x >= 2) return 0.0;
    return std::exp(-1 / ((x - 1) * (2 - x)));
  };
  // no phase: plain integral, against a fine Simpson sum
  const int m = 100000;
  double s = 0;
  for (int i = 0; i <= m; ++i) s += bump(1 + double(i) / m) * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
  s /= 3.0 * m;
  const QuadratureResult q0 = oscillatory_integral(bump, 1, 2, 0.0, 1.0, 0.5);
  CHECK(std::abs(q0.value - cplx(s, 0)) < 1e-9);
  CHECK(std::abs(oscillatory_integral([](double) { return 0.0; }, 1, 2, 1, 0.1, 0.5).value) == 0.0);
  Vec eps{0.1, 0.05, 0.02, 0.01}, mag;
  for (double e : eps) mag.push_back(std::abs(oscillatory_integral(bump, 1, 2, 1.0, e, 0.5).value));
  const double C = mag[0] / eps[0];
  for (size_t i = 1; i < eps.size(); ++i) CHECK(mag[i] <= C * eps[i]);
}

TEST_CASE("weak pairing decay") {
  const SpectralGrid g(1024, 4096);
  const Vec phi = sample_fn(g, [](double x) { return std::exp(-x * x / 4); });
  const Vec z0 = sample_fn(g, [](double x) { return std::exp(-x * x / 400); });
  const Vec eps{0.1, 0.05, 0.02, 0.01};
  const DecayReport r = weak_pairing_decay({z0, Vec(g.size(), 0.0)}, phi, 1.0, eps, 0.5, g);
  for (size_t i = 1; i < eps.size(); ++i) CHECK(r.measured[i] < r.measured[i - 1]);
  const DecayReport zero = weak_pairing_decay({Vec(g.size(), 0.0), Vec(g.size(), 0.0)}, phi, 1.0, eps, 0.5, g);
  for (double v : zero.measured) CHECK(v == 0.0);
  // odd test function against even data
  const Vec odd = sample_fn(g, [](double x) { return x * std::exp(-x * x / 4); });
  const Vec ze = sample_fn(g, [](double x) { return std::exp(-x * x); });
  const DecayReport par = weak_pairing_decay({ze, Vec(g.size(), 0.0)}, odd, 1.0, eps, 0.5, g);
  for (double v : par.measured) CHECK(v < 1e-14);
}

TEST_CASE("l2 limit") {
  const SpectralGrid g(200, 4096);
  const Vec bump = sample_fn(g, [](double x) { return std::exp(-(x / 30) * (x / 30)); });
  const Vec zero(g.size(), 0.0);
  const DecayReport r = l2_limit_experiment({bump, zero}, 1.0, {0.1, 0.01, 0.001}, 0.5, g);
  const double half = 0.5 * inner(bump, bump, g);
  CHECK(r.reference[0] == doctest::Approx(half).epsilon(1e-14));
  const Vec& dev = r.extra[0].second;
  CHECK(dev[2] <= 0.05);
  CHECK(dev[1] < dev[0]);
  CHECK(dev[2] < dev[1]);
  // psi-only data tends to half of |omega(D) psi|^2
  const DecayReport p = l2_limit_experiment({zero, bump}, 1.0, {0.001}, 0.5, g);
  const Vec wp = apply_multiplier(bump, MultiplierSymbol::omega(), g, 0.5);
  CHECK(p.reference[0] == doctest::Approx(0.5 * inner(wp, wp, g)).epsilon(1e-14));
  CHECK(p.extra[0].second[0] <= 0.05);
  const DecayReport z = l2_limit_experiment({zero, zero}, 1.0, {0.1}, 0.5, g);
  CHECK(z.measured[0] == 0.0);
}

TEST_CASE("padding factor covers the reach") {
  const SpectralGrid g(200, 64);
  CHECK(padding_factor(g, 0.0) == 1);
  CHECK(padding_factor(g, 1000.0) == 16);
}

TEST_CASE("dispersive decay") {
  const SpectralGrid g(512, 4096);
  const Vec phi = sample_fn(g, [](double x) { return std::exp(-4 * x * x); });
  Vec ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(std::pow(100.0, i / 20.0));
  const DecayReport r = dispersive_decay_experiment(phi, 1.0, ts, g);
  CHECK(r.extra[0].second[0] == doctest::Approx(1.0));
  for (double v : r.extra[0].second) CHECK(v <= 1 + 1e-12);
  CHECK(dispersive_sup(phi, 0.0, 1.0, g) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dispersive_sup(Vec(g.size(), 0.0), 5.0, 1.0, g) == 0.0);
  CHECK_THROWS_AS(dispersive_decay_experiment(phi, 1.0, {2.0, 1.0}, g), PreconditionError);
}
