#include "experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dn.hpp"
#include "errors.hpp"
#include "euler.hpp"
#include "linear.hpp"
#include "parallel.hpp"
#include "solver.hpp"

#ifndef RIGLID_VERSION
#define RIGLID_VERSION "0.0.0"
#endif

namespace riglid {

std::string code_version() { return RIGLID_VERSION; }

namespace {

struct ExperimentInfo {
  const char* experiment;
  int criterion;
  const char* id;
};

constexpr ExperimentInfo kExperiments[] = {
    {"propagator", 1, "propagator_exactness"},
    {"linear-energy", 2, "linear_energy_drift"},
    {"linear-limit", 3, "l2_limit_deviation"},
    {"weak-decay", 4, "weak_pairing_bound"},
    {"dispersion", 5, "dispersive_envelope"},
    {"dn-fidelity", 6, "dn_operator_fidelity"},
    {"dn-expansion", 7, "dn_expansion_slope"},
    {"shape-derivative", 8, "shape_derivative_error"},
    {"lin-vs-nonlin", 9, "lin_nonlin_gap"},
    {"conservation", 10, "hamiltonian_drift"},
    {"rigid-lid-scaling", 11, "wbar_slope"},
    {"extension", 12, "extension_identities"},
    {"null-check", 13, "null_solution"},
    {"reconstruct", 14, "euler_residual_order"},
};

const ExperimentInfo& info_of(const std::string& e) {
  for (const auto& s : kExperiments)
    if (e == s.experiment) return s;
  throw ConfigurationError("experiment: unknown name '" + e + "'");
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Assertion check(const std::string& experiment, bool passed, double measured, double threshold, std::string detail) {
  const ExperimentInfo& s = info_of(experiment);
  return {s.id, s.criterion, passed, measured, threshold, std::move(detail)};
}

PhysicalParams params_of(const RunConfig& c, double eps) {
  PhysicalParams p;
  p.epsilon = eps;
  p.mu = c.mu;
  return p;
}

SolverConfig solver_of(const RunConfig& c) {
  SolverConfig s;
  s.dt = c.dt;
  s.T = c.T;
  s.dn_mode = parse_dn_mode(c.dn_mode);
  s.n_z = c.n_z;
  s.dealias = c.dealias;
  s.monitor_every = c.monitor_every;
  s.N = c.N;
  return s;
}

SurfaceState initial_state(const RunConfig& c, const SpectralGrid& g) {
  return {data_profile(c, g, c.amplitude), data_profile(c, g, c.psi_amplitude)};
}

double rel_sup(const Vec& a, const Vec& b) {
  double d = 0, m = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    m = std::max(m, std::abs(b[i]));
  }
  return m > 0 ? d / m : d;
}

double rel_state(const SurfaceState& a, const SurfaceState& b) {
  Vec x(a.zeta), y(b.zeta);
  x.insert(x.end(), a.psi.begin(), a.psi.end());
  y.insert(y.end(), b.psi.begin(), b.psi.end());
  return rel_sup(x, y);
}

double rel_l2(const Vec& a, const Vec& b, const SpectralGrid& g) {
  Vec d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double nb = l2_norm(b, g);
  return nb > 0 ? l2_norm(d, g) / nb : l2_norm(d, g);
}

bool strictly_decreasing(const Vec& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

CsvTable report_table(const std::string& file, const DecayReport& r, const std::vector<std::string>& names) {
  CsvTable t{file, names, {}};
  for (size_t i = 0; i < r.x.size(); ++i) {
    std::vector<double> row{r.x[i], r.measured[i], r.reference[i]};
    for (const auto& e : r.extra) row.push_back(e.second[i]);
    t.add(row);
  }
  return t;
}

// ---------------------------------------------------------------------------

ExperimentResult propagator_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const LinearPropagator lp(g, c.mu);
  const double eps = c.epsilon;
  const Vec t_list = c.t_list.empty() ? Vec{c.t} : c.t_list;
  CsvTable tab{"propagator.csv", {"mode", "t", "rel_error"}, {}};
  double worst = 0;
  std::vector<int> modes{1, 2, 5, c.n / 12, c.n / 6, c.n / 3};
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  for (int k : modes) {
    if (k < 1) continue;
    const long double xi = 2.0L * M_PI * k / c.L, sm = std::sqrt(static_cast<long double>(c.mu));
    const long double om = std::sqrt(xi * std::tanh(sm * xi) / sm);
    const Vec z0 = sample_fn(g, [&](double x) { return std::cos(static_cast<double>(xi) * x); });
    const Vec p0 = sample_fn(g, [&](double x) {
      return 0.7 * std::sin(static_cast<double>(xi) * x) + 0.3 * std::cos(static_cast<double>(xi) * x);
    });
    for (double t : t_list) {
      const SurfaceState s = lp.apply({z0, p0}, t, eps);
      const long double th = om * t / eps;
      const long double ct = std::cos(th), st = std::sin(th);
      SurfaceState ex{Vec(g.size()), Vec(g.size())};
      for (int i = 0; i < g.size(); ++i) {
        ex.zeta[i] = static_cast<double>(ct * z0[i] + om * st * p0[i]);
        ex.psi[i] = static_cast<double>(-st / om * z0[i] + ct * p0[i]);
      }
      const double e = rel_state(s, ex);
      worst = std::max(worst, e);
      tab.add({double(k), t, e});
    }
  }
  // composition on Gaussian data
  SurfaceState s0{data_profile(c, g, c.amplitude),
                  sample_fn(g, [&](double x) { return 0.5 * std::exp(-(x - 1) * (x - 1) / 4); })};
  double group = 0, rev = 0;
  for (double t1 : t_list)
    for (double t2 : t_list) {
      const SurfaceState a = lp.apply(lp.apply(s0, t1, eps), t2, eps), b = lp.apply(s0, t1 + t2, eps);
      group = std::max(group, rel_state(a, b));
    }
  for (double t : t_list) rev = std::max(rev, rel_state(lp.apply(lp.apply(s0, t, eps), -t, eps), s0));
  CsvTable comp{"propagator_group.csv", {"group_rel_error", "reversibility_rel_error"}, {{group, rev}}};
  r.tables = {tab, comp};
  const bool ok = worst <= 1e-13 && group <= 1e-12 && rev <= 1e-12;
  r.assertions.push_back(check(c.experiment, ok, worst, 1e-13,
                               "single-mode " + fmt("%.3g", worst) + " (<= 1e-13); group " + fmt("%.3g", group) +
                                   ", reversibility " + fmt("%.3g", rev) + " (<= 1e-12)"));
  return r;
}

ExperimentResult linear_energy_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const LinearPropagator lp(g, c.mu);
  SurfaceState s = initial_state(c, g);
  const double H0 = linear_hamiltonian(s, c.mu, g);
  const int steps = static_cast<int>(std::lround(c.T / c.dt));
  const int every = std::max(1, steps / 100);
  CsvTable tab{"linear_energy.csv", {"t", "hamiltonian", "drift"}, {{0.0, H0, 0.0}}};
  double worst = 0;
  CVec zh = g.forward(s.zeta), ph = g.forward(s.psi);
  for (int n = 1; n <= steps; ++n) {
    lp.apply_coeffs(zh, ph, c.dt, c.epsilon);
    if (n % every == 0 || n == steps) {
      const SurfaceState cur{g.inverse(zh), g.inverse(ph)};
      const double H = linear_hamiltonian(cur, c.mu, g), d = std::abs(H - H0) / H0;
      worst = std::max(worst, d);
      tab.add({n * c.dt, H, d});
    }
  }
  r.tables = {tab};
  r.assertions.push_back(check(c.experiment, worst <= 1e-12, worst, 1e-12,
                               std::to_string(steps) + " steps of " + fmt("%.3g", c.dt)));
  return r;
}

ExperimentResult linear_limit_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec eps = c.epsilon_list.empty() ? Vec{c.epsilon} : c.epsilon_list;
  const Vec bump = data_profile(c, g, c.amplitude), zero(g.size(), 0.0);
  const DecayReport rz = l2_limit_experiment({bump, zero}, c.t, eps, c.mu, g);
  const DecayReport rp = l2_limit_experiment({zero, bump}, c.t, eps, c.mu, g);
  CsvTable tz{"linear_limit.csv", {"epsilon", "l2_sq", "reference", "deviation"}, {}};
  CsvTable tp{"linear_limit_psi.csv", {"epsilon", "l2_sq", "reference", "deviation"}, {}};
  for (size_t i = 0; i < eps.size(); ++i) {
    tz.add({rz.x[i], rz.measured[i], rz.reference[i], rz.extra[0].second[i]});
    tp.add({rp.x[i], rp.measured[i], rp.reference[i], rp.extra[0].second[i]});
  }
  r.tables = {tz, tp};
  r.summary["slope"] = rz.slope;
  r.summary["slope_psi"] = rp.slope;
  r.summary["padding"] = rz.extra[1].second.front();
  const Vec& dev = rz.extra[0].second;
  const bool mono = strictly_decreasing(dev);
  r.assertions.push_back(check(c.experiment, mono && dev.back() <= 0.05, dev.back(), 0.05,
                               std::string("deviation at smallest epsilon; monotone ") + (mono ? "yes" : "no") +
                                   "; psi-only deviation " + fmt("%.3g", rp.extra[0].second.back())));
  return r;
}

ExperimentResult weak_decay_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec eps = c.epsilon_list.empty() ? Vec{c.epsilon} : c.epsilon_list;
  const Vec phi = sample_fn(g, [](double x) { return std::exp(-x * x / 4); });
  const SurfaceState s0{data_profile(c, g, c.amplitude), Vec(g.size(), 0.0)};
  const DecayReport rep = weak_pairing_decay(s0, phi, c.t, eps, c.mu, g);
  r.tables = {report_table("weak_decay.csv", rep, {"epsilon", "pairing", "bound"})};
  r.summary["slope"] = rep.slope;
  r.summary["C"] = rep.measured[0] / rep.x[0];
  bool bound = true;
  for (size_t i = 1; i < rep.x.size(); ++i) bound = bound && rep.measured[i] <= rep.reference[i] * (1 + 1e-12);
  const bool mono = strictly_decreasing(rep.measured);
  r.assertions.push_back(check(c.experiment, bound && rep.slope >= 0.9, rep.slope, 0.9,
                               std::string("fitted slope; under C eps: ") + (bound ? "yes" : "no") +
                                   "; monotone " + (mono ? "yes" : "no")));
  return r;
}

ExperimentResult dispersion_exp(const RunConfig& c, int jobs) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec mus = c.mu_list.empty() ? Vec{c.mu} : c.mu_list;
  const Vec t_list = c.t_list.empty() ? Vec{c.t} : c.t_list;
  const Vec phi = data_profile(c, g, c.amplitude);
  std::vector<DecayReport> reps(mus.size());
  parallel_for(static_cast<int>(mus.size()), jobs,
               [&](int i) { reps[i] = dispersive_decay_experiment(phi, mus[i], t_list, g); });
  CsvTable tab{"dispersion.csv", {"mu", "t", "sup", "bound", "ratio"}, {}};
  double worst = 0;
  for (size_t m = 0; m < mus.size(); ++m) {
    const DecayReport& d = reps[m];
    for (size_t i = 0; i < d.x.size(); ++i) {
      tab.add({mus[m], d.x[i], d.measured[i], d.reference[i], d.extra[0].second[i]});
      worst = std::max(worst, d.extra[0].second[i]);
    }
    r.summary["slope_mu_" + format_double(mus[m])] = d.slope;
    r.summary["calibration_mu_" + format_double(mus[m])] = d.extra[1].second.front();
  }
  r.tables = {tab};
  r.assertions.push_back(check(c.experiment, worst <= 1 + 1e-12, worst, 1.0, "max sup / bound over t and mu"));
  return r;
}

ExperimentResult dn_fidelity_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const double eps = c.epsilon;
  const Vec psi = sample_fn(g, [](double x) { return std::exp(-(x / 2) * (x / 2)); });
  const Vec zero(g.size(), 0.0);
  const Vec exact = apply_multiplier(psi, MultiplierSymbol::g0(), g, c.mu);

  CsvTable conv{"dn_fidelity.csv", {"n_z", "flat_rel_error"}, {}};
  Vec nzs{8, 16, 32}, errs;
  for (double nz : nzs) {
    const DNSolver s(g, c.mu, static_cast<int>(nz));
    errs.push_back(rel_l2(s.solve(zero, psi, eps).G, exact, g));
    conv.add({nz, errs.back()});
  }
  const double order = -loglog_slope(nzs, errs);
  const DNSolver s(g, c.mu, c.n_z);
  const double flat = rel_l2(s.solve(zero, psi, eps).G, exact, g);
  conv.add({double(c.n_z), flat});

  // symmetry and positivity on a curved surface, with seeded smooth test functions
  const Vec zeta = data_profile(c, g, c.amplitude);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> nd;
  auto random_fn = [&]() {
    Vec a(8), ph(8);
    for (int k = 0; k < 8; ++k) {
      a[k] = nd(rng) / (1 + k);
      ph[k] = nd(rng);
    }
    return sample_fn(g, [&](double x) {
      double v = 0;
      for (int k = 0; k < 8; ++k) v += a[k] * std::cos(g.xi()[k + 1] * x + ph[k]);
      return v * (1 + 0.5 * std::exp(-x * x / 16));
    });
  };
  double sym = 0, pos = 1e300;
  CsvTable sp{"dn_symmetry.csv", {"trial", "symmetry_defect", "positivity"}, {}};
  for (int trial = 0; trial < 4; ++trial) {
    const Vec a = random_fn(), b = random_fn();
    const Vec Ga = s.apply(zeta, a, eps), Gb = s.apply(zeta, b, eps);
    const double d = std::abs(inner(Ga, b, g) - inner(a, Gb, g)) / (l2_norm(Ga, g) * l2_norm(b, g));
    const double q = inner(Ga, a, g) / inner(a, a, g);
    sym = std::max(sym, d);
    pos = std::min(pos, q);
    sp.add({double(trial), d, q});
  }
  r.tables = {conv, sp};
  r.summary["vertical_order"] = order;
  const bool ok = flat <= 1e-8 && sym <= 1e-8 && pos >= -1e-10 && order >= 3.8;
  r.assertions.push_back(check(c.experiment, ok, flat, 1e-8,
                               "flat rel error at n_z=" + std::to_string(c.n_z) + " " + fmt("%.3g", flat) +
                                   "; symmetry " + fmt("%.3g", sym) + " (<= 1e-8); min (G psi, psi)/|psi|^2 " +
                                   fmt("%.3g", pos) + " (>= -1e-10); vertical order " + fmt("%.3f", order) +
                                   " (>= 3.8)"));
  return r;
}

ExperimentResult dn_expansion_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec eps = c.epsilon_list.empty() ? Vec{c.epsilon} : c.epsilon_list;
  const Vec zeta = data_profile(c, g, c.amplitude);
  const Vec psi = sample_fn(g, [](double x) { return std::exp(-((x - 1) / 3) * ((x - 1) / 3)); });
  const DNSolver s(g, c.mu, c.n_z);
  const Vec g1 = dn_g1(zeta, psi, c.mu, g);
  CsvTable tab{"dn_expansion.csv", {"epsilon", "remainder", "remainder_over_eps2"}, {}};
  Vec rem;
  for (double e : eps) {
    // G - G_0 with the discrete flat part removed exactly
    const Vec d = s.solve(zeta, psi, e).diff;
    Vec q(g.size());
    for (int i = 0; i < g.size(); ++i) q[i] = d[i] - e * g1[i];
    rem.push_back(l2_norm(q, g));
    tab.add({e, rem.back(), rem.back() / (e * e)});
  }
  const double slope = loglog_slope(eps, rem);
  r.tables = {tab};
  r.summary["slope"] = slope;
  r.assertions.push_back(check(c.experiment, std::abs(slope - 2) <= 0.1, slope, 2.0, "log-log slope, 2 +/- 0.1"));
  return r;
}

ExperimentResult shape_derivative_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const double eps = c.epsilon;
  const Vec zeta = data_profile(c, g, c.amplitude);
  const Vec psi =
      sample_fn(g, [&](double x) { return c.psi_amplitude * std::exp(-((x - 1) / 3) * ((x - 1) / 3)); });
  const Vec hdir = sample_fn(g, [](double x) {
    const double s = 1 / std::cosh(x / 3);
    return s * s;
  });
  const DNSolver s(g, c.mu, c.n_z);
  const Vec closed = dn_shape_derivative(s, zeta, psi, hdir, eps);
  auto centered = [&](double d) {
    Vec zp(zeta), zm(zeta);
    for (int i = 0; i < g.size(); ++i) {
      zp[i] += d * hdir[i];
      zm[i] -= d * hdir[i];
    }
    const Vec a = s.apply(zp, psi, eps), b = s.apply(zm, psi, eps);
    Vec out(g.size());
    for (int i = 0; i < g.size(); ++i) out[i] = (a[i] - b[i]) / (2 * d);
    return out;
  };
  // rows pair delta with 2 delta for the extrapolation
  CsvTable tab{"shape_derivative.csv", {"delta", "centered_rel_error", "richardson_rel_error"}, {}};
  double best = 1e300;
  Vec prev;
  for (double d : {4e-4, 2e-4, 1e-4}) {
    const Vec D = centered(d);
    if (!prev.empty()) {
      Vec R(g.size());
      for (int i = 0; i < g.size(); ++i) R[i] = (4 * D[i] - prev[i]) / 3;
      const double rich = rel_l2(closed, R, g);
      best = std::min(best, rich);
      tab.add({d, rel_l2(closed, D, g), rich});
    }
    prev = D;
  }
  r.tables = {tab};
  r.assertions.push_back(
      check(c.experiment, best <= 1e-6, best, 1e-6, "closed formula vs Richardson-extrapolated centered differences"));
  return r;
}

ExperimentResult lin_vs_nonlin_exp(const RunConfig& c, int jobs) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec eps = c.epsilon_list.empty() ? Vec{c.epsilon} : c.epsilon_list;
  const DecayReport rep =
      lin_vs_nonlin_experiment(initial_state(c, g), g, params_of(c, eps.front()), solver_of(c), eps, jobs);
  r.tables = {report_table("lin_vs_nonlin.csv", rep, {"epsilon", "error", "bound", "mu_bound", "steps", "aborted"})};
  r.flags = rep.flags;
  r.summary["slope"] = rep.slope;
  r.summary["C"] = rep.measured[0] / std::pow(rep.x[0], 0.125);
  bool bound = true;
  for (size_t i = 0; i < rep.x.size(); ++i) bound = bound && rep.measured[i] <= rep.reference[i] * (1 + 1e-12);
  const bool mono = strictly_decreasing(rep.measured);
  const bool ok = bound && mono && rep.flags.empty();
  r.assertions.push_back(check(c.experiment, ok, rep.measured.back(), rep.reference.back(),
                               std::string("error at smallest epsilon vs C eps^(1/8); decreasing ") +
                                   (mono ? "yes" : "no") + "; under bound " + (bound ? "yes" : "no") +
                                   "; fitted slope " + fmt("%.3f", rep.slope)));
  return r;
}

ExperimentResult conservation_exp(const RunConfig& c, int jobs) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const PhysicalParams p = params_of(c, c.epsilon);
  const SurfaceState s0 = initial_state(c, g);
  const Vec dts = c.t_list.empty() ? Vec{4 * c.dt, 2 * c.dt} : c.t_list;

  std::vector<Trajectory> runs(dts.size() + 1);
  parallel_for(static_cast<int>(runs.size()), jobs, [&](int i) {
    SolverConfig sc = solver_of(c);
    sc.energy_monitor = false;
    if (i > 0) {
      sc.dt = dts[i - 1];
      sc.monitor_every = 1;
    }
    const WWSolver solver(g, p, sc);
    Trajectory tr = solver.simulate(s0);
    for (const auto& s : tr.states) {
      tr.hamiltonian.push_back(solver.hamiltonian(s));
      tr.hamiltonian_conserved.push_back(solver.hamiltonian_conserved(s));
    }
    runs[i] = std::move(tr);
  });
  auto drift = [](const Vec& H) {
    double d = 0;
    for (double h : H) d = std::max(d, std::abs(h - H.front()) / std::abs(H.front()));
    return d;
  };
  const Trajectory& main = runs[0];
  CsvTable tr{"conservation.csv", {"t", "hamiltonian", "hamiltonian_printed"}, {}};
  for (size_t i = 0; i < main.times.size(); ++i)
    tr.add({main.times[i], main.hamiltonian_conserved[i], main.hamiltonian[i]});
  const double d0 = drift(main.hamiltonian_conserved), dp = drift(main.hamiltonian);

  CsvTable ord{"conservation_order.csv", {"dt", "final_drift", "max_drift"}, {}};
  Vec fin;
  for (size_t i = 0; i < dts.size(); ++i) {
    const Vec& H = runs[i + 1].hamiltonian_conserved;
    fin.push_back(std::abs(H.back() - H.front()) / std::abs(H.front()));
    ord.add({dts[i], fin.back(), drift(H)});
  }
  ord.add({c.dt, std::abs(main.hamiltonian_conserved.back() - main.hamiltonian_conserved.front()) /
                     std::abs(main.hamiltonian_conserved.front()),
           d0});
  const double order = dts.size() > 1 ? loglog_slope(dts, fin) : 0.0;
  r.tables = {tr, ord};
  r.summary["order"] = order;
  r.summary["printed_form_drift"] = dp;
  for (const auto& t : runs)
    for (const auto& f : t.flags) r.flags.push_back(f);
  const bool aborted = std::any_of(runs.begin(), runs.end(), [](const Trajectory& t) { return t.aborted; });
  const bool ok = !aborted && d0 <= 1e-6 && std::abs(order - 4) <= 0.3;
  r.assertions.push_back(check(c.experiment, ok, d0, 1e-6,
                               "drift at dt=" + fmt("%.3g", c.dt) + "; order " + fmt("%.3f", order) +
                                   " (4 +/- 0.3); printed-form drift " + fmt("%.3g", dp)));
  return r;
}

ExperimentResult rigid_lid_exp(const RunConfig& c, int jobs) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const Vec eps = c.epsilon_list.empty() ? Vec{c.epsilon} : c.epsilon_list;
  const DecayReport rep =
      rigid_lid_scaling_experiment(initial_state(c, g), g, params_of(c, eps.front()), solver_of(c), eps, jobs);
  r.tables = {report_table("rigid_lid_scaling.csv", rep, {"epsilon", "wbar_sup", "reference", "wbar_over_eps"})};
  r.flags = rep.flags;
  r.summary["slope"] = rep.slope;
  const bool ok = std::abs(rep.slope - 2) <= 0.3 && rep.flags.empty();
  r.assertions.push_back(check(c.experiment, ok, rep.slope, 2.0, "fitted slope of |w|_inf at final time, 2 +/- 0.3"));
  return r;
}

// z-derivatives of order 0..d at level j0 from a least-squares Chebyshev fit of
// degree D over the M levels on one side (dir = +1 above, -1 below)
Vec ls_derivatives(const StripField& P, int i, int j0, int dir, int M, int D, int dmax) {
  Eigen::MatrixXd A(M + 1, D + 1);
  Eigen::VectorXd b(M + 1);
  for (int m = 0; m <= M; ++m) {
    const double x = 2.0 * m / M - 1;
    double t0 = 1, t1 = x;
    for (int n = 0; n <= D; ++n) {
      double tn = n == 0 ? 1 : x;
      if (n >= 2) {
        tn = 2 * x * t1 - t0;
        t0 = t1;
        t1 = tn;
      }
      A(m, n) = tn;
    }
    b(m) = P.at(j0 + dir * m, i);
  }
  const Eigen::VectorXd cf = A.colPivHouseholderQr().solve(b);
  Vec out;
  const double W = M * P.h;
  for (int d = 0; d <= dmax; ++d) {
    // T_n^(d)(-1)
    double s = 0;
    for (int n = 0; n <= D; ++n) {
      double v = ((n + d) % 2) ? -1.0 : 1.0;
      for (int k = 0; k < d; ++k) v *= (double(n) * n - double(k) * k) / (2 * k + 1);
      s += cf(n) * v;
    }
    out.push_back(s * std::pow(2.0 / W * dir, d));
  }
  return out;
}

ExperimentResult extension_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  const int J = 2;
  auto smooth = [&](int nz) {
    StripField u(g.size(), nz + 1, -1.0, 1.0 / nz);
    for (int j = 0; j <= nz; ++j)
      for (int i = 0; i < g.size(); ++i) u.at(j, i) = std::cos(g.nodes()[i]) * std::exp(u.z(j));
    return u;
  };
  CsvTable tab{"extension.csv",
               {"k", "moment_residual", "trace_top", "trace_bottom", "polynomial_error", "restriction_exact",
                "ratio_nz16", "ratio_nz32", "ratio_nz64", "ratio_spread"},
               {}};
  double moment = 0, trace = 0, poly = 0, spread = 0;
  bool restrict_ok = true;
  for (int k = 1; k <= 4; ++k) {
    const ExtensionPlan plan = make_plan(k, J);
    moment = std::max(moment, plan.residual);
    const int nz = c.n_z;
    const StripField u = smooth(nz);
    const StripField P = extend_strip(u, plan);
    // traces at z = 0 and z = -1; column i = 0 sits at x = -L/2
    const double cx = std::cos(g.nodes()[0]);
    const Vec top = ls_derivatives(P, 0, (J + 1) * nz, +1, nz, 12, k - 1);
    const Vec bot = ls_derivatives(P, 0, J * nz, -1, nz, 12, k - 1);
    double tt = 0, tb = 0;
    for (int d = 0; d < k; ++d) {
      tt = std::max(tt, std::abs(top[d] - cx * std::exp(0.0)) / std::abs(cx));
      tb = std::max(tb, std::abs(bot[d] - cx * std::exp(-1.0)) / std::abs(cx * std::exp(-1.0)));
    }
    trace = std::max({trace, tt, tb});
    // polynomials of degree < k continue exactly across both interfaces
    StripField q(g.size(), nz + 1, -1.0, 1.0 / nz);
    auto pz = [k](double z) {
      double v = 0;
      for (int m = 0; m < k; ++m) v += std::pow(z + 0.3, m) / (m + 1);
      return v;
    };
    for (int j = 0; j <= nz; ++j)
      for (int i = 0; i < g.size(); ++i) q.at(j, i) = std::cos(g.nodes()[i]) * pz(q.z(j));
    const StripField Q = extend_strip(q, plan);
    double pe = 0, pm = 0;
    for (int j = (J - 1) * nz; j <= (J + 2) * nz; ++j)
      for (int i = 0; i < g.size(); ++i) {
        const double ex = std::cos(g.nodes()[i]) * pz(Q.z(j));
        pe = std::max(pe, std::abs(Q.at(j, i) - ex));
        pm = std::max(pm, std::abs(ex));
      }
    poly = std::max(poly, pe / pm);
    bool same = true;
    for (int j = 0; j <= nz; ++j)
      for (int i = 0; i < g.size(); ++i) same = same && P.at(J * nz + j, i) == u.at(j, i);
    restrict_ok = restrict_ok && same;
    Vec ratios;
    for (int m : {16, 32, 64}) {
      const StripField um = smooth(m);
      ratios.push_back(hsk_norm(extend_strip(um, plan), g, 1, k) / hsk_norm(um, g, 1, k));
    }
    const double sp = std::max(std::abs(ratios[0] / ratios[2] - 1), std::abs(ratios[1] / ratios[2] - 1));
    spread = std::max(spread, sp);
    tab.add({double(k), plan.residual, tt, tb, pe / pm, same ? 1.0 : 0.0, ratios[0], ratios[1], ratios[2], sp});
  }
  r.tables = {tab};
  const bool ok = moment <= 1e-10 && trace <= 1e-8 && poly <= 1e-10 && restrict_ok && spread <= 0.05;
  r.assertions.push_back(check(c.experiment, ok, trace, 1e-8,
                               "trace matching " + fmt("%.3g", trace) + "; moments " + fmt("%.3g", moment) +
                                   " (<= 1e-10); polynomial " + fmt("%.3g", poly) + " (<= 1e-10); restriction " +
                                   (restrict_ok ? "exact" : "NOT exact") + "; norm-ratio spread " +
                                   fmt("%.3g", spread) + " (<= 0.05)"));
  return r;
}

ExperimentResult null_check_exp(const RunConfig& c) {
  ExperimentResult r;
  const SpectralGrid g(c.L, c.n);
  double before = 0, after = 0;
  rigid_lid_null_check(g, c.mu, c.n_z, static_cast<unsigned>(c.seed), &before, &after);
  r.tables = {CsvTable{"null_check.csv", {"seed", "initial_grad_norm", "residual"}, {{double(c.seed), before, after}}}};
  r.assertions.push_back(check(c.experiment, after <= 1e-10, after, 1e-10, "|grad Phi|_2 after the solve"));
  return r;
}

ExperimentResult reconstruct_exp(const RunConfig& c) {
  ExperimentResult r;
  ReconstructCase rc;
  rc.epsilon = c.epsilon;
  rc.mu = c.mu;
  rc.L = c.L;
  rc.n = c.n;
  rc.nz = c.n_z;
  rc.dt = c.dt;
  rc.t_mid = c.t;
  rc.amplitude = c.amplitude;
  rc.width = c.width;
  rc.psi_amplitude = c.psi_amplitude;
  const OrderStudy st = euler_order_study(rc);
  CsvTable tab{"reconstruct.csv", {"residual", "coarse", "fine", "order", "scale", "at_floor"}, {}};
  double worst = 1e300;
  std::string names;
  for (size_t i = 0; i < st.names.size(); ++i) {
    tab.add({double(i), st.coarse[i], st.fine[i], st.order[i], st.scale[i], st.at_floor[i] ? 1.0 : 0.0});
    if (!st.at_floor[i]) worst = std::min(worst, st.order[i]);
    names += (i ? "," : "") + std::to_string(i) + "=" + st.names[i];
    r.summary["order_" + st.names[i]] = st.order[i];
  }
  r.summary["kinematic_vs_zcs"] = st.kinematic_vs_zcs;
  r.summary["residual_index"] = names;
  r.tables = {tab};
  r.assertions.push_back(check(c.experiment, worst >= 1.8, worst, 1.8,
                               "smallest observed order among residuals above the round-off floor; " + names));
  return r;
}

}  // namespace

int criterion_of(const std::string& e) { return info_of(e).criterion; }
std::string assertion_id_of(const std::string& e) { return info_of(e).id; }

ExperimentResult compute_experiment(const RunConfig& c, int jobs) {
  validate_config(c);
  jobs = std::max(1, jobs);
  const std::string& e = c.experiment;
  ExperimentResult r;
  if (e == "propagator") r = propagator_exp(c);
  else if (e == "linear-energy") r = linear_energy_exp(c);
  else if (e == "linear-limit") r = linear_limit_exp(c);
  else if (e == "weak-decay") r = weak_decay_exp(c);
  else if (e == "dispersion") r = dispersion_exp(c, jobs);
  else if (e == "dn-fidelity") r = dn_fidelity_exp(c);
  else if (e == "dn-expansion") r = dn_expansion_exp(c);
  else if (e == "shape-derivative") r = shape_derivative_exp(c);
  else if (e == "lin-vs-nonlin") r = lin_vs_nonlin_exp(c, jobs);
  else if (e == "conservation") r = conservation_exp(c, jobs);
  else if (e == "rigid-lid-scaling") r = rigid_lid_exp(c, jobs);
  else if (e == "extension") r = extension_exp(c);
  else if (e == "null-check") r = null_check_exp(c);
  else if (e == "reconstruct") r = reconstruct_exp(c);
  else throw ConfigurationError("experiment: unknown name '" + e + "'");
  r.experiment = e;
  r.complete = true;
  bool all = true;
  for (const auto& a : r.assertions) all = all && a.passed;
  r.exit_code = all ? kExitPass : kExitAssertion;
  return r;
}

std::string csv_text(const CsvTable& t) {
  std::string s;
  for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
    s += "\n";
  }
  return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + tmp + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

nlohmann::json manifest_json(const RunConfig& c, const ExperimentResult& r) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  j["config"] = config_json(c);
  j["code_version"] = code_version();
  j["wall_time_s"] = r.wall_time;
  j["complete"] = r.complete;
  j["exit_code"] = r.exit_code;
  if (!r.error.empty()) j["error"] = r.error;
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : r.assertions)
    j["assertions"].push_back({{"id", a.id},
                               {"criterion", a.criterion},
                               {"passed", a.passed},
                               {"measured", a.measured},
                               {"threshold", a.threshold},
                               {"detail", a.detail}});
  j["outputs"] = r.outputs;
  j["flags"] = r.flags;
  j["summary"] = r.summary;
  return j;
}

ExperimentResult run_experiment(const RunConfig& c, const std::string& out_dir, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r;
  r.experiment = c.experiment;
  try {
    r = compute_experiment(c, jobs);
  } catch (const Error& e) {
    r.complete = false;
    r.error = "experiment " + c.experiment + ": " + e.what();
    r.exit_code = e.kind() == ErrorKind::Configuration ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    r.complete = false;
    r.error = "experiment " + c.experiment + ": " + e.what();
    r.exit_code = kExitRuntime;
  }
  r.experiment = c.experiment;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    std::filesystem::create_directories(out_dir);
    for (const auto& t : r.tables) {
      const std::string path = (std::filesystem::path(out_dir) / t.file).string();
      write_file_atomic(path, csv_text(t));
      r.outputs.push_back(path);
    }
    const std::string mpath = (std::filesystem::path(out_dir) / "manifest.json").string();
    write_file_atomic(mpath, manifest_json(c, r).dump(2) + "\n");
    r.outputs.push_back(mpath);
  } catch (const std::exception& e) {
    r.complete = false;
    if (r.error.empty()) r.error = std::string("output: ") + e.what();
    r.exit_code = kExitRuntime;
  }
  return r;
}

}  // namespace riglid
