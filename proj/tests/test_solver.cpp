#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "errors.hpp"
#include "solver.hpp"

using namespace riglid;

namespace {

Vec gaussian(const SpectralGrid& g, double a, double w, double shift = 0) {
  return sample_fn(g, [&](double x) { return a * std::exp(-((x - shift) / w) * ((x - shift) / w)); });
}

double maxdiff(const Vec& a, const Vec& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double state_diff(const SurfaceState& a, const SurfaceState& b) {
  return std::max(maxdiff(a.zeta, b.zeta), maxdiff(a.psi, b.psi));
}

PhysicalParams params(double eps, double mu = 0.5) {
  PhysicalParams p;
  p.epsilon = eps;
  p.mu = mu;
  return p;
}

SolverConfig config(double dt, double T, int nz = 16) {
  SolverConfig c;
  c.dt = dt;
  c.T = T;
  c.n_z = nz;
  return c;
}

}  // namespace

TEST_CASE("rest state") {
  const SpectralGrid g(20, 64);
  const WWSolver s(g, params(0.1), config(0.01, 0.05));
  const SurfaceState rest{Vec(64, 0.0), Vec(64, 0.0)};
  const SurfaceState r = s.rhs(rest);
  CHECK(sup_norm(r.zeta) == 0.0);
  CHECK(sup_norm(r.psi) == 0.0);
  const Trajectory tr = s.simulate(rest);
  for (const auto& st : tr.states) CHECK(sup_norm(st.zeta) + sup_norm(st.psi) == 0.0);
  CHECK(s.hamiltonian(rest) == 0.0);
  CHECK(s.energy_EN(rest, 3) == 0.0);
  for (double a : s.rayleigh_taylor(tr, 2)) CHECK(a == 1.0);
}

TEST_CASE("small amplitude tendencies are the linear ones") {
  const SpectralGrid g(30, 128);
  const double eps = 0.1, mu = 0.5, amp = 1e-6;
  const WWSolver s(g, params(eps, mu), config(0.01, 1));
  const SurfaceState st{gaussian(g, amp, 2), gaussian(g, amp, 3, 1)};
  const SurfaceState r = s.rhs(st);
  const Vec g0 = apply_multiplier(st.psi, MultiplierSymbol::g0(), g, mu);
  Vec lz(128), lp(128);
  for (int i = 0; i < 128; ++i) {
    lz[i] = g0[i] / (eps * mu);
    lp[i] = -st.zeta[i] / eps;
  }
  CHECK(maxdiff(r.zeta, lz) <= 10 * amp * sup_norm(lz));
  CHECK(maxdiff(r.psi, lp) <= 10 * amp * sup_norm(lp));
}

TEST_CASE("nonlinear remainder is rhs minus the linear part") {
  const SpectralGrid g(30, 128);
  const double eps = 0.2, mu = 0.5;
  const WWSolver s(g, params(eps, mu), config(0.01, 1, 32));
  const SurfaceState st{gaussian(g, 0.8, 2), gaussian(g, 0.5, 3, 1)};
  const SurfaceState r = s.rhs(st), f = s.nonlinear(st);
  // rhs carries the discrete flat operator, F the exact one
  const double tol = 1e-6 * std::max(sup_norm(r.zeta), sup_norm(r.psi));
  const Vec g0 = apply_multiplier(st.psi, MultiplierSymbol::g0(), g, mu);
  for (int i = 0; i < 128; ++i) {
    CHECK(std::abs(r.zeta[i] - g0[i] / (eps * mu) - f.zeta[i]) <= tol);
    CHECK(std::abs(r.psi[i] + st.zeta[i] / eps - f.psi[i]) <= tol);
  }
  // F written out from the DN split
  const DNSolution sol = s.dn().solve(st.zeta, st.psi, eps);
  const Vec zx = deriv(st.zeta, g), px = deriv(st.psi, g);
  for (int i = 0; i < 128; ++i) {
    const double G = g0[i] + sol.diff[i];
    const double q = G + eps * mu * zx[i] * px[i];
    const double fp = -0.5 * px[i] * px[i] + q * q / (2 * mu * (1 + eps * eps * mu * zx[i] * zx[i]));
    CHECK(f.zeta[i] == doctest::Approx(sol.diff[i] / (mu * eps)).scale(1).epsilon(1e-12));
    CHECK(f.psi[i] == doctest::Approx(fp).scale(1).epsilon(1e-12));
  }
}

TEST_CASE("zeroed F gives the exact linear flow") {
  const SpectralGrid g(30, 128);
  SolverConfig c = config(0.05, 1);
  c.zero_nonlinear = true;
  const WWSolver s(g, params(0.1), c);
  const SurfaceState st{gaussian(g, 0.5, 2), gaussian(g, 0.3, 3, 1)};
  const SurfaceState a = s.step(st, 0.05), b = propagate_linear(st, 0.05, 0.1, 0.5, g);
  CHECK(state_diff(a, b) < 1e-13);
  CHECK(state_diff(s.step(a, -0.05), st) < 1e-12);
}

TEST_CASE("fourth-order self-convergence") {
  const SpectralGrid g(32, 64);
  const PhysicalParams p = params(0.1);
  const SurfaceState s0{gaussian(g, 1, 2), Vec(64, 0.0)};
  auto final_state = [&](double dt) {
    SolverConfig c = config(dt, 0.4);
    c.energy_monitor = false;
    c.monitor_every = 1000;
    return WWSolver(g, p, c).simulate(s0).states.back();
  };
  const SurfaceState ref = final_state(0.1 / 32), a = final_state(0.1 / 2), b = final_state(0.1 / 4);
  const double order = std::log2(state_diff(a, ref) / state_diff(b, ref));
  CHECK(std::abs(order - 4) <= 0.3);
}

TEST_CASE("linearization limit") {
  const SpectralGrid g(40, 128);
  SolverConfig c = config(0.01, 1);
  c.monitor_every = 10;
  const SurfaceState s0{gaussian(g, 1, 2), Vec(128, 0.0)};
  Vec err;
  // only where dt resolves the fast phase; below that the stepper error dominates the gap
  for (double eps : {0.1, 0.03, 0.01}) err.push_back(lin_vs_nonlin_run(s0, g, params(eps), c).error);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("hamiltonian forms") {
  const SpectralGrid g(2 * M_PI, 32);
  const WWSolver s(g, params(0.1), config(0.01, 1));
  const SurfaceState st{sample_fn(g, [](double x) { return std::cos(x); }), Vec(32, 0.0)};
  CHECK(s.hamiltonian(st) == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(s.hamiltonian_conserved(st) == doctest::Approx(M_PI / 2).epsilon(1e-13));
}

TEST_CASE("conservation, mass, parity and the energy bound") {
  const SpectralGrid g(32, 128);
  SolverConfig c = config(0.01, 1);
  c.monitor_every = 10;
  const WWSolver s(g, params(0.1), c);
  const SurfaceState s0{gaussian(g, 1, 2), Vec(128, 0.0)};
  const Trajectory tr = s.simulate(s0);
  REQUIRE(!tr.aborted);
  const double H0 = tr.hamiltonian_conserved.front(), m0 = inner(s0.zeta, Vec(128, 1.0), g);
  double Emax = 0;
  for (size_t i = 0; i < tr.states.size(); ++i) {
    CHECK(std::abs(tr.hamiltonian_conserved[i] - H0) <= 1e-4 * H0);
    // the discrete DN operator has zero mean only to its vertical accuracy
    CHECK(std::abs(inner(tr.states[i].zeta, Vec(128, 1.0), g) - m0) <= 1e-6);
    Emax = std::max(Emax, tr.energy[i]);
  }
  CHECK(Emax <= 2 * tr.energy.front());
  // even data stays even: x_i and x_{n-i} are mirror nodes
  const SurfaceState& last = tr.states.back();
  for (int i = 1; i < 128; ++i) CHECK(std::abs(last.zeta[i] - last.zeta[128 - i]) < 1e-10);
  for (size_t i = 1; i + 1 < tr.states.size(); ++i) {
    const Vec a = s.rayleigh_taylor(tr, i);
    CHECK(*std::min_element(a.begin(), a.end()) >= 0.5);
  }
}

TEST_CASE("energy collapses to Sobolev norms for vanishing epsilon") {
  const SpectralGrid g(32, 128);
  const WWSolver s(g, params(1e-12), config(0.01, 1));
  const SurfaceState st{gaussian(g, 1, 2), gaussian(g, 0.5, 3, 1)};
  const auto P = [&](const Vec& f) { return apply_multiplier(f, MultiplierSymbol::frac_p(), g, 0.5); };
  double e = hs_norm(P(st.psi), g, 2.5);
  for (int a = 0; a <= 3; ++a) {
    const Vec z = a ? deriv(st.zeta, g, a) : st.zeta, p = a ? deriv(st.psi, g, a) : st.psi;
    e += l2_norm(z, g) + l2_norm(P(p), g);
  }
  CHECK(s.energy_EN(st, 3) == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("Rayleigh-Taylor coefficient tends to one") {
  const SpectralGrid g(32, 128);
  Vec dev;
  for (double eps : {0.1, 0.05}) {
    SolverConfig c = config(0.01, 0.2);
    const WWSolver s(g, params(eps), c);
    const Trajectory tr = s.simulate({gaussian(g, 1, 2), Vec(128, 0.0)});
    double m = 0;
    for (size_t i = 1; i + 1 < tr.states.size(); ++i)
      for (double a : s.rayleigh_taylor(tr, i)) m = std::max(m, std::abs(a - 1));
    dev.push_back(m);
  }
  CHECK(dev[1] < dev[0]);
  const WWSolver s(g, params(0.1), config(0.01, 0.05));
  const Trajectory tr = s.simulate({gaussian(g, 1, 2), Vec(128, 0.0)});
  CHECK_THROWS_AS(s.rayleigh_taylor(tr, 0), ContextError);
}

TEST_CASE("gap is quadratic in the amplitude") {
  const SpectralGrid g(32, 128);
  SolverConfig c = config(0.01, 0.5);
  c.monitor_every = 5;
  Vec err;
  for (double a : {0.02, 0.01}) err.push_back(lin_vs_nonlin_run({gaussian(g, a, 2), Vec(128, 0.0)}, g, params(0.1), c).error);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("admissibility") {
  const SpectralGrid g(32, 64);
  const WWSolver s(g, params(0.1), config(0.01, 0.1));
  const SurfaceState bad{gaussian(g, -9.5, 2), Vec(64, 0.0)};
  CHECK(min_height(bad.zeta, 0.1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK_THROWS_AS(s.step(bad, 0.01), AdmissibilityError);
  CHECK_THROWS_AS(s.simulate(bad), AdmissibilityError);
  SolverConfig c = config(0.0, 1);
  CHECK_THROWS_AS(WWSolver(g, params(0.1), c), ConfigurationError);
  CHECK_THROWS_AS(WWSolver(g, params(0.0), config(0.01, 1)), ConfigurationError);
}

TEST_CASE("checkpoint round trip is bitwise") {
  const SpectralGrid g(12.5, 32);
  const SurfaceState st{gaussian(g, 0.3, 1.7), gaussian(g, -0.2, 2.1, 0.4)};
  const auto dir = std::filesystem::temp_directory_path() / "riglid_ckpt_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "state").string();
  dump_state(stem, st, g, params(0.1), 0.375);
  double L = 0, t = 0;
  int n = 0;
  const SurfaceState back = restore_state(stem, &L, &n, &t);
  CHECK(back.zeta == st.zeta);
  CHECK(back.psi == st.psi);
  CHECK(L == 12.5);
  CHECK(n == 32);
  CHECK(t == 0.375);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(restore_state(stem), IoError);
}
