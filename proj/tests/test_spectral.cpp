#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "errors.hpp"
#include "spectral.hpp"

using namespace riglid;

namespace {

Vec randn(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid layout") {
  const SpectralGrid g(2 * M_PI, 8);
  const Vec w = g.wavenumbers();
  REQUIRE(w.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(w[i] == doctest::Approx(i - 4));
  CHECK(g.nodes()[0] == doctest::Approx(-M_PI));
  CHECK(SpectralGrid(100, 4096).dx() == 100.0 / 4096);
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(SpectralGrid(1.0, 12), ConfigurationError);
  CHECK_THROWS_AS(SpectralGrid(1.0, 4), ConfigurationError);
  CHECK_THROWS_AS(SpectralGrid(0.0, 16), ConfigurationError);
  CHECK_THROWS_AS(SpectralGrid(-1.0, 16), ConfigurationError);
}

TEST_CASE("transform round trip") {
  const SpectralGrid g(10.0, 64);
  const Vec f = randn(64, 1);
  CHECK(max_abs_diff(g.inverse(g.forward(f)), f) < 1e-13);
  // forward carries 1/n: the constant 3 has c_0 = 3
  const CVec c = g.forward(Vec(64, 3.0));
  CHECK(std::abs(c[0] - cplx(3, 0)) < 1e-14);
  for (int k = 1; k < g.nhalf(); ++k) CHECK(std::abs(c[k]) < 1e-14);
}

TEST_CASE("coefficients round trip") {
  const SpectralGrid g(3.0, 32);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  CVec c(g.nhalf());
  for (auto& z : c) z = cplx(nd(rng), nd(rng));
  c[0] = c[0].real();
  c.back() = c.back().real();
  const CVec back = g.forward(g.inverse(c));
  for (int k = 0; k < g.nhalf(); ++k) CHECK(std::abs(back[k] - c[k]) < 1e-13);
}

TEST_CASE("batched transforms agree with single ones") {
  const SpectralGrid g(5.0, 16);
  Vec f = randn(3 * 16, 3);
  CVec c(3 * g.nhalf());
  g.forward_many(f.data(), c.data(), 3);
  for (int r = 0; r < 3; ++r) {
    const CVec one = g.forward(Vec(f.begin() + 16 * r, f.begin() + 16 * (r + 1)));
    for (int k = 0; k < g.nhalf(); ++k) CHECK(std::abs(one[k] - c[r * g.nhalf() + k]) < 1e-14);
  }
}

TEST_CASE("scalar symbols") {
  CHECK(omega_scalar(1.0, 1.0) == doctest::Approx(std::sqrt(std::tanh(1.0))).epsilon(1e-14));
  CHECK(omega_scalar(1.0, 1.0) == doctest::Approx(0.8726936).epsilon(1e-6));
  CHECK(omega_scalar(0.0, 0.3) == 0.0);
  CHECK(omega_scalar(1.0, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(omega_scalar(-2.0, 0.5) == omega_scalar(2.0, 0.5));
  double prev = 0;
  for (double xi = 0.1; xi < 50; xi += 0.1) {
    const double o = omega_scalar(xi, 0.5);
    CHECK(o > prev);
    prev = o;
  }
  CHECK(frac_p_scalar(3.0, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(g0_scalar(2.0, 0.25) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("multipliers on single modes") {
  const SpectralGrid g(2 * M_PI, 32);
  const Vec c2 = sample_fn(g, [](double x) { return std::cos(2 * x); });
  const Vec r = apply_multiplier(c2, MultiplierSymbol::g0(), g, 0.25);
  for (int i = 0; i < g.size(); ++i) CHECK(r[i] == doctest::Approx(0.7615941559557649 * c2[i]).epsilon(1e-12));
  const Vec c3 = sample_fn(g, [](double x) { return std::cos(3 * x); });
  const Vec p = apply_multiplier(c3, MultiplierSymbol::frac_p(), g, 1.0);
  for (int i = 0; i < g.size(); ++i) CHECK(p[i] == doctest::Approx(1.5 * c3[i]).epsilon(1e-12));
  const Vec one(g.size(), 1.0);
  for (auto s : {MultiplierSymbol::g0(), MultiplierSymbol::frac_p(), MultiplierSymbol::omega(), MultiplierSymbol::abs_d()})
    CHECK(sup_norm(apply_multiplier(one, s, g, 0.5)) < 1e-14);
  const Vec l = apply_multiplier(c3, MultiplierSymbol::lambda(2.0), g, 0.5);
  for (int i = 0; i < g.size(); ++i) CHECK(l[i] == doctest::Approx(10 * c3[i]).epsilon(1e-12));
}

TEST_CASE("multipliers are self-adjoint and omega^2 = G0/mu") {
  const SpectralGrid g(20.0, 128);
  const Vec f = randn(128, 11), h = randn(128, 12);
  for (auto s : {MultiplierSymbol::g0(), MultiplierSymbol::frac_p(), MultiplierSymbol::omega(),
                 MultiplierSymbol::abs_d(), MultiplierSymbol::lambda(-1.5)}) {
    const double a = inner(apply_multiplier(f, s, g, 0.3), h, g), b = inner(f, apply_multiplier(h, s, g, 0.3), g);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0));
  }
  const Vec oo = apply_multiplier(apply_multiplier(f, MultiplierSymbol::omega(), g, 0.3), MultiplierSymbol::omega(), g, 0.3);
  Vec gg = apply_multiplier(f, MultiplierSymbol::g0(), g, 0.3);
  for (auto& v : gg) v /= 0.3;
  CHECK(max_abs_diff(oo, gg) <= 1e-12 * sup_norm(gg));
  CHECK(inner(apply_multiplier(f, MultiplierSymbol::g0(), g, 0.3), f, g) >= 0);
}

TEST_CASE("frac_p equivalence ratio on the resolved band") {
  for (double mu : {0.01, 0.1, 0.5, 1.0}) {
    const SpectralGrid g(50.0, 256);
    for (int k = 1; k < g.nhalf(); ++k) {
      const double xi = g.xi()[k], p = frac_p_scalar(xi, mu);
      const double ratio = g0_scalar(xi, mu) / mu / (p * p);
      // tanh(y)(1 + y)/y with y = sqrt(mu)|xi| lies in [1, 1.53]
      CHECK(ratio >= 1 - 1e-12);
      CHECK(ratio < 1.53);
    }
  }
}

TEST_CASE("custom symbol table") {
  const SpectralGrid g(2 * M_PI, 16);
  Vec t(g.nhalf(), 0.0);
  t[2] = 5.0;
  const Vec f = sample_fn(g, [](double x) { return std::cos(x) + std::cos(2 * x); });
  const Vec r = apply_multiplier(f, MultiplierSymbol::custom(t), g, 0.5);
  for (int i = 0; i < g.size(); ++i) CHECK(r[i] == doctest::Approx(5 * std::cos(2 * g.nodes()[i])).epsilon(1e-12));
  CHECK_THROWS_AS(apply_multiplier(f, MultiplierSymbol::custom(Vec(3, 1.0)), g, 0.5), ShapeError);
}

TEST_CASE("shape errors") {
  const SpectralGrid g(1.0, 16);
  CHECK_THROWS_AS(apply_multiplier(Vec(15, 0.0), MultiplierSymbol::g0(), g, 0.5), ShapeError);
  CHECK_THROWS_AS(inner(Vec(16, 0.0), Vec(8, 0.0), g), ShapeError);
}

TEST_CASE("derivatives") {
  const SpectralGrid g(2 * M_PI, 32);
  const Vec s = sample_fn(g, [](double x) { return std::sin(3 * x); });
  const Vec d = deriv(s, g), d2 = deriv(s, g, 2);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(d[i] == doctest::Approx(3 * std::cos(3 * g.nodes()[i])).epsilon(1e-12).scale(1));
    CHECK(d2[i] == doctest::Approx(-9 * s[i]).epsilon(1e-12).scale(1));
  }
  // the Nyquist mode has no odd derivative
  const Vec nyq = sample_fn(g, [](double x) { return std::cos(16 * x); });
  CHECK(sup_norm(deriv(nyq, g)) < 1e-12);
}

TEST_CASE("dealiasing keeps 3k <= n") {
  const SpectralGrid g(2 * M_PI, 32);
  const Vec lo = sample_fn(g, [](double x) { return std::cos(10 * x); });
  const Vec hi = sample_fn(g, [](double x) { return std::cos(11 * x); });
  CHECK(max_abs_diff(dealias(lo, g), lo) < 1e-13);
  CHECK(sup_norm(dealias(hi, g)) < 1e-13);
}

TEST_CASE("norms") {
  const SpectralGrid g(2 * M_PI, 64);
  const Vec c = sample_fn(g, [](double x) { return std::cos(x); });
  CHECK(l2_norm(c, g) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(hs_norm(c, g, 0.0) == l2_norm(c, g));
  // |cos|_{H^1}^2 = (1 + 1) pi
  CHECK(hs_norm(c, g, 1.0) == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-13));
  CHECK(sup_norm(Vec{-3, 2, 1}) == 3);
}

TEST_CASE("weighted norm matches quadrature") {
  const SpectralGrid g(40.0, 1024);
  const Vec f = sample_fn(g, [](double x) { return std::exp(-x * x); });
  // |x f'|^2 = int 4 x^4 exp(-2x^2) dx, evaluated by composite Simpson on a fine mesh
  const int m = 200000;
  const double a = -10, b = 10, h = (b - a) / m;
  double s = 0;
  for (int i = 0; i <= m; ++i) {
    const double x = a + i * h, v = 4 * std::pow(x, 4) * std::exp(-2 * x * x);
    s += v * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
  }
  const double oracle = std::sqrt(s * h / 3);
  CHECK(std::abs(weighted_norm(f, g) - oracle) <= 1e-8 * oracle);
  const Vec wide = sample_fn(g, [](double x) { return std::exp(-x * x / 100); });
  CHECK_THROWS_AS(weighted_norm(wide, g), PreconditionError);
}

TEST_CASE("log-log slope") {
  const Vec x{1, 2, 4, 8};
  Vec y;
  for (double v : x) y.push_back(3 * v * v);
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isnan(loglog_slope(Vec{1}, Vec{1})));
}
