#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>

#include "errors.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace riglid {

void SolverConfig::validate() const {
  if (!(dt > 0)) throw ConfigurationError("solver.dt must be > 0");
  if (!(T > 0)) throw ConfigurationError("solver.T must be > 0");
  if (monitor_every < 1) throw ConfigurationError("solver.monitor_every must be >= 1");
  if (N < 0 || N > 5) throw ConfigurationError("solver.N must lie in [0, 5]");
  if (n_z < 6) throw ConfigurationError("grid.n_z must be >= 6");
  if (max_halvings < 0) throw ConfigurationError("solver.max_halvings must be >= 0");
}

double min_height(const Vec& zeta, double eps) {
  double m = 1e300;
  for (double z : zeta) m = std::min(m, 1 + eps * z);
  return m;
}

WWSolver::WWSolver(const SpectralGrid& g, const PhysicalParams& p, const SolverConfig& c)
    : g_(g), p_(p), c_(c), lp_(g, p.mu) {
  p_.validate();
  c_.validate();
  dn_ = std::make_unique<DNSolver>(g_, p_.mu, c_.n_z, 1e-12, c_.dealias);
}

WWSolver::Coeffs WWSolver::to_coeffs(const SurfaceState& s) const {
  check_length(s.zeta, g_, "zeta");
  check_length(s.psi, g_, "psi");
  return {g_.forward(s.zeta), g_.forward(s.psi)};
}

SurfaceState WWSolver::from_coeffs(const Coeffs& c) const { return {g_.inverse(c.z), g_.inverse(c.p)}; }

namespace {

void check_admissible(const Vec& zeta, const PhysicalParams& p) {
  const double h = min_height(zeta, p.epsilon);
  if (h < p.h_min) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "water height %.6g below h_min = %.6g", h, p.h_min);
    throw AdmissibilityError(buf);
  }
}

// -1/2 psi_x^2 + (G + eps mu zeta_x psi_x)^2 / (2 mu (1 + eps^2 mu zeta_x^2))
Vec bernoulli_terms(const Vec& G, const Vec& zx, const Vec& px, double eps, double mu) {
  Vec out(G.size());
  for (size_t i = 0; i < G.size(); ++i) {
    const double a = G[i] + eps * mu * zx[i] * px[i];
    out[i] = -0.5 * px[i] * px[i] + a * a / (2 * mu * (1 + eps * eps * mu * zx[i] * zx[i]));
  }
  return out;
}

}  // namespace

// G0 psi (exact multiplier) plus the discrete correction; this is the operator
// the stepper actually advances, so it is also the one whose energy is conserved
Vec WWSolver::effective_G(const SurfaceState& s, Vec* diff) const {
  const double eps = p_.epsilon, mu = p_.mu;
  Vec G = apply_multiplier(s.psi, MultiplierSymbol::g0(), g_, mu);
  Vec d(g_.size(), 0.0);
  switch (c_.dn_mode) {
    case DNMode::Elliptic: {
      check_admissible(s.zeta, p_);
      d = dn_->solve(s.zeta, s.psi, eps).diff;
      break;
    }
    case DNMode::Expansion1: {
      d = dn_g1(s.zeta, s.psi, mu, g_);
      for (double& v : d) v *= eps;
      break;
    }
    case DNMode::Flat:
      break;
  }
  for (int i = 0; i < g_.size(); ++i) G[i] += d[i];
  if (diff) *diff = std::move(d);
  return G;
}

Vec WWSolver::dn_apply(const SurfaceState& s) const {
  if (c_.dn_mode == DNMode::Elliptic) check_admissible(s.zeta, p_);
  return riglid::dn_apply(*dn_, s.zeta, s.psi, p_.epsilon, c_.dn_mode);
}

SurfaceState WWSolver::rhs(const SurfaceState& s) const {
  check_length(s.zeta, g_, "zeta");
  check_length(s.psi, g_, "psi");
  const double eps = p_.epsilon, mu = p_.mu;
  const Vec G = dn_apply(s);
  const Vec zx = deriv(s.zeta, g_), px = deriv(s.psi, g_);
  const Vec b = bernoulli_terms(G, zx, px, eps, mu);
  SurfaceState out{Vec(g_.size()), Vec(g_.size())};
  for (int i = 0; i < g_.size(); ++i) {
    out.zeta[i] = G[i] / (eps * mu);
    out.psi[i] = (-s.zeta[i] + eps * b[i]) / eps;
  }
  return out;
}

SurfaceState WWSolver::nonlinear(const SurfaceState& s) const {
  const double eps = p_.epsilon, mu = p_.mu;
  SurfaceState out{Vec(g_.size(), 0.0), Vec(g_.size(), 0.0)};
  if (c_.zero_nonlinear) return out;
  Vec diff;
  const Vec G = effective_G(s, &diff);
  const Vec zx = deriv(s.zeta, g_), px = deriv(s.psi, g_);
  out.psi = bernoulli_terms(G, zx, px, eps, mu);
  for (int i = 0; i < g_.size(); ++i) out.zeta[i] = diff[i] / (mu * eps);
  return out;
}

WWSolver::Coeffs WWSolver::F(const Coeffs& u) const {
  if (c_.zero_nonlinear) return {CVec(u.z.size(), 0.0), CVec(u.p.size(), 0.0)};
  const SurfaceState f = nonlinear(from_coeffs(u));
  Coeffs out{g_.forward(f.zeta), g_.forward(f.psi)};
  if (c_.dealias) {
    dealias_coeffs(out.z, g_);
    dealias_coeffs(out.p, g_);
  }
  return out;
}

namespace {

void axpy(CVec& y, double a, const CVec& x) {
  for (size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

}  // namespace

// Lawson RK4: classical RK4 on v = E(-t) u, written back in the u frame
WWSolver::Coeffs WWSolver::step_coeffs(const Coeffs& u, double h) const {
  const double eps = p_.epsilon;
  auto E = [&](Coeffs c, double t) {
    lp_.apply_coeffs(c.z, c.p, t, eps);
    return c;
  };
  auto comb = [](Coeffs a, double s, const Coeffs& b) {
    axpy(a.z, s, b.z);
    axpy(a.p, s, b.p);
    return a;
  };
  const Coeffs a = F(u);
  const Coeffs eu = E(u, h / 2);
  const Coeffs b = F(E(comb(u, h / 2, a), h / 2));
  const Coeffs c = F(comb(eu, h / 2, b));
  const Coeffs d = F(E(comb(eu, h, c), h / 2));
  Coeffs inner = E(comb(u, h / 6, a), h / 2);
  inner = comb(inner, h / 3, b);
  inner = comb(inner, h / 3, c);
  return comb(E(inner, h / 2), h / 6, d);
}

SurfaceState WWSolver::step(const SurfaceState& s, double dt) const {
  if (c_.dn_mode == DNMode::Elliptic && !c_.zero_nonlinear) check_admissible(s.zeta, p_);
  SurfaceState out = from_coeffs(step_coeffs(to_coeffs(s), dt));
  if (!c_.zero_nonlinear) {
    const double h = min_height(out.zeta, p_.epsilon);
    if (h < p_.h_min) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "step rejected: height %.6g below h_min = %.6g after dt = %.6g", h, p_.h_min,
                    dt);
      throw AdmissibilityError(buf);
    }
  }
  return out;
}

double WWSolver::hamiltonian(const SurfaceState& s) const {
  check_admissible(s.zeta, p_);
  const Vec G = dn_->apply(s.zeta, s.psi, p_.epsilon);
  return inner(G, s.psi, g_) / (2 * p_.mu) + inner(s.zeta, s.zeta, g_);
}

double WWSolver::hamiltonian_conserved(const SurfaceState& s) const {
  const Vec G = effective_G(s, nullptr);
  return inner(G, s.psi, g_) / (2 * p_.mu) + 0.5 * inner(s.zeta, s.zeta, g_);
}

namespace {

GoodUnknowns build_good(const SurfaceState& s, const Vec& w, double eps, int N, const SpectralGrid& g) {
  GoodUnknowns gu;
  for (int a = 0; a <= N; ++a) {
    Vec z = a ? deriv(s.zeta, g, a) : s.zeta;
    Vec p = a ? deriv(s.psi, g, a) : s.psi;
    for (size_t i = 0; i < p.size(); ++i) p[i] -= eps * w[i] * z[i];
    gu.zeta_a.push_back(std::move(z));
    gu.psi_a.push_back(std::move(p));
  }
  return gu;
}

double frac_p_norm(const Vec& f, const SpectralGrid& g, double mu, double s) {
  const Vec pf = apply_multiplier(f, MultiplierSymbol::frac_p(), g, mu);
  return s == 0 ? l2_norm(pf, g) : hs_norm(pf, g, s);
}

constexpr double kT0 = 1.0;  // t0 slot of the energy at d = 1

}  // namespace

GoodUnknowns WWSolver::good_unknowns(const SurfaceState& s, int N) const {
  const Vec w = trace_velocities(effective_G(s, nullptr), s.zeta, s.psi, p_.epsilon, p_.mu, g_).w;
  return build_good(s, w, p_.epsilon, N, g_);
}

double WWSolver::energy_EN(const SurfaceState& s, int N) const {
  const GoodUnknowns gu = good_unknowns(s, N);
  double e = frac_p_norm(s.psi, g_, p_.mu, kT0 + 1.5);
  for (int a = 0; a <= N; ++a) e += l2_norm(gu.zeta_a[a], g_) + frac_p_norm(gu.psi_a[a], g_, p_.mu, 0);
  return e;
}

namespace {

// centered j-th time difference of a trajectory component at index i
Vec time_diff(const Trajectory& tr, size_t i, int j, bool zeta) {
  auto f = [&](size_t m) -> const Vec& { return zeta ? tr.states[m].zeta : tr.states[m].psi; };
  if (j == 0) return f(i);
  const double dt = tr.times[i + 1] - tr.times[i];
  const Vec &a = f(i - 1), &b = f(i), &c = f(i + 1);
  Vec out(b.size());
  for (size_t k = 0; k < b.size(); ++k)
    out[k] = j == 1 ? (c[k] - a[k]) / (2 * dt) : (c[k] - 2 * b[k] + a[k]) / (dt * dt);
  return out;
}

void require_interior(const Trajectory& tr, size_t index) {
  if (index == 0 || index + 1 >= tr.states.size())
    throw ContextError("centered time difference needs trajectory samples on both sides of the index");
  const double d0 = tr.times[index] - tr.times[index - 1], d1 = tr.times[index + 1] - tr.times[index];
  if (std::abs(d0 - d1) > 1e-9 * std::abs(d1)) throw ContextError("trajectory samples are not uniformly spaced");
}

}  // namespace

double WWSolver::energy_EN_time(const Trajectory& tr, size_t index, int N) const {
  if (index >= tr.states.size()) throw ContextError("trajectory index out of range");
  if (N >= 1) require_interior(tr, index);
  const SurfaceState& s = tr.states[index];
  const Vec w = trace_velocities(effective_G(s, nullptr), s.zeta, s.psi, p_.epsilon, p_.mu, g_).w;
  double e = frac_p_norm(s.psi, g_, p_.mu, kT0 + 1.5);
  for (int j = 0; j <= std::min(2, N); ++j) {
    const Vec zt = time_diff(tr, index, j, true), pt = time_diff(tr, index, j, false);
    for (int a = 0; a + j <= N; ++a) {
      const Vec z = a ? deriv(zt, g_, a) : zt;
      Vec p = a ? deriv(pt, g_, a) : pt;
      for (size_t i = 0; i < p.size(); ++i) p[i] -= p_.epsilon * w[i] * z[i];
      e += l2_norm(z, g_) + frac_p_norm(p, g_, p_.mu, 0);
    }
  }
  return e;
}

Vec WWSolver::rayleigh_taylor(const Trajectory& tr, size_t index) const {
  if (index >= tr.states.size()) throw ContextError("trajectory index out of range");
  require_interior(tr, index);
  const double eps = p_.epsilon, mu = p_.mu;
  auto tv = [&](size_t m) {
    const SurfaceState& s = tr.states[m];
    return trace_velocities(effective_G(s, nullptr), s.zeta, s.psi, eps, mu, g_);
  };
  const TraceVelocities a = tv(index - 1), b = tv(index), c = tv(index + 1);
  const double dt = tr.times[index + 1] - tr.times[index];
  const Vec wx = deriv(b.w, g_);
  Vec out(g_.size());
  for (int i = 0; i < g_.size(); ++i)
    out[i] = 1 + eps * (eps * (c.w[i] - a.w[i]) / (2 * dt) + eps * b.V[i] * wx[i]);
  return out;
}

double WWSolver::rayleigh_taylor_initial(const SurfaceState& s) const {
  // d_t w along the flow from a symmetric pair of tiny Euler steps
  const double eps = p_.epsilon, mu = p_.mu;
  const SurfaceState r = rhs(s);
  const double scale = std::max(1.0, std::max(sup_norm(r.zeta), sup_norm(r.psi)));
  const double d = 1e-5 / scale;
  auto shifted = [&](double sign) {
    SurfaceState t = s;
    for (int i = 0; i < g_.size(); ++i) {
      t.zeta[i] += sign * d * r.zeta[i];
      t.psi[i] += sign * d * r.psi[i];
    }
    return trace_velocities(effective_G(t, nullptr), t.zeta, t.psi, eps, mu, g_);
  };
  const TraceVelocities a = shifted(-1), c = shifted(1);
  const TraceVelocities b = trace_velocities(effective_G(s, nullptr), s.zeta, s.psi, eps, mu, g_);
  const Vec wx = deriv(b.w, g_);
  double m = 1e300;
  for (int i = 0; i < g_.size(); ++i)
    m = std::min(m, 1 + eps * (eps * (c.w[i] - a.w[i]) / (2 * d) + eps * b.V[i] * wx[i]));
  return m;
}

Trajectory WWSolver::simulate(const SurfaceState& s0) const {
  check_admissible(s0.zeta, p_);
  Trajectory tr;
  if (c_.energy_monitor) {
    const double a = rayleigh_taylor_initial(s0);
    if (a < p_.a0) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "Rayleigh-Taylor coefficient %.6g below a0 = %.6g at t = 0", a, p_.a0);
      throw AdmissibilityError(buf);
    }
  }
  const int nsteps = std::max(1, static_cast<int>(std::llround(c_.T / c_.dt)));
  const double dt = c_.T / nsteps;

  auto record = [&](const SurfaceState& s, double t) {
    tr.times.push_back(t);
    tr.states.push_back(s);
    tr.min_height.push_back(min_height(s.zeta, p_.epsilon));
    if (c_.energy_monitor) {
      tr.hamiltonian.push_back(hamiltonian(s));
      tr.hamiltonian_conserved.push_back(hamiltonian_conserved(s));
      tr.energy.push_back(energy_EN(s, c_.N));
    }
  };

  // halve on rejection, up to max_halvings levels
  std::function<SurfaceState(const SurfaceState&, double, int)> advance = [&](const SurfaceState& s, double h,
                                                                             int level) -> SurfaceState {
    try {
      return step(s, h);
    } catch (const AdmissibilityError&) {
      if (level >= c_.max_halvings) throw;
      return advance(advance(s, h / 2, level + 1), h / 2, level + 1);
    }
  };

  SurfaceState cur = s0;
  record(s0, 0.0);
  for (int n = 1; n <= nsteps; ++n) {
    try {
      cur = advance(cur, dt, 0);
    } catch (const AdmissibilityError& e) {
      tr.aborted = true;
      char buf[64];
      std::snprintf(buf, sizeof buf, "height: aborted at t = %.6g: ", (n - 1) * dt);
      tr.flags.push_back(buf + std::string(e.what()));
      break;
    }
    tr.steps = n;
    if (n % c_.monitor_every == 0 || n == nsteps) record(cur, n * dt);
  }

  if (c_.energy_monitor && tr.states.size() >= 3) {
    bool uniform = true;
    const double d0 = tr.times[1] - tr.times[0];
    for (size_t i = 1; i + 1 < tr.times.size(); ++i)
      uniform = uniform && std::abs(tr.times[i + 1] - tr.times[i] - d0) < 1e-9 * d0;
    if (uniform) {
      double amin = 1e300;
      for (size_t i = 1; i + 1 < tr.states.size(); ++i) {
        const Vec a = rayleigh_taylor(tr, i);
        amin = std::min(amin, *std::min_element(a.begin(), a.end()));
      }
      if (amin < p_.a0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "rayleigh-taylor: min a = %.6g below a0 = %.6g", amin, p_.a0);
        tr.flags.push_back(buf);
      }
    }
  }
  return tr;
}

GapRun lin_vs_nonlin_run(const SurfaceState& s0, const SpectralGrid& g, PhysicalParams p, const SolverConfig& c) {
  SolverConfig cc = c;
  cc.energy_monitor = false;
  WWSolver solver(g, p, cc);
  const Trajectory tr = solver.simulate(s0);
  GapRun r;
  r.epsilon = p.epsilon;
  r.steps = tr.steps;
  r.aborted = tr.aborted;
  const LinearPropagator& lp = solver.propagator();
  for (size_t i = 0; i < tr.states.size(); ++i) {
    const SurfaceState lin = lp.apply(s0, tr.times[i], p.epsilon);
    Vec dz(g.size()), dp(g.size());
    for (int j = 0; j < g.size(); ++j) {
      dz[j] = lin.zeta[j] - tr.states[i].zeta[j];
      dp[j] = lin.psi[j] - tr.states[i].psi[j];
    }
    const double e = std::hypot(l2_norm(dz, g), frac_p_norm(dp, g, p.mu, 0));
    r.error = std::max(r.error, e);
  }
  const SurfaceState& last = tr.states.back();
  const Vec G = solver.dn().apply(last.zeta, last.psi, p.epsilon);
  r.wbar_sup = sup_norm(trace_velocities(G, last.zeta, last.psi, p.epsilon, p.mu, g).w);
  return r;
}

DecayReport lin_vs_nonlin_experiment(const SurfaceState& s0, const SpectralGrid& g, const PhysicalParams& p,
                                     const SolverConfig& c, const Vec& eps_list, int jobs) {
  if (eps_list.empty()) throw ConfigurationError("epsilon list is empty");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw ConfigurationError("epsilon list must be strictly decreasing");
  std::vector<GapRun> runs(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), jobs, [&](int i) {
    PhysicalParams q = p;
    q.epsilon = eps_list[i];
    runs[i] = lin_vs_nonlin_run(s0, g, q, c);
  });
  DecayReport rep;
  rep.abscissa = "epsilon";
  rep.x = eps_list;
  Vec with_mu(eps_list.size()), steps(eps_list.size()), aborted(eps_list.size());
  const double mu = p.mu;
  auto mu_shape = [&](double e) { return std::pow(e, 0.125) / std::pow(mu, 3.0 / 16) + std::sqrt(e) * std::pow(mu, 0.25); };
  const double C = runs[0].error / std::pow(eps_list[0], 0.125);
  const double C2 = runs[0].error / mu_shape(eps_list[0]);
  for (size_t i = 0; i < runs.size(); ++i) {
    rep.measured.push_back(runs[i].error);
    rep.reference.push_back(C * std::pow(eps_list[i], 0.125));
    with_mu[i] = C2 * mu_shape(eps_list[i]);
    steps[i] = runs[i].steps;
    aborted[i] = runs[i].aborted ? 1 : 0;
    if (runs[i].aborted) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "aborted at epsilon = %.6g", eps_list[i]);
      rep.flags.push_back(buf);
    }
  }
  rep.slope = loglog_slope(rep.x, rep.measured);
  rep.extra = {{"mu_bound", with_mu}, {"steps", steps}, {"aborted", aborted}};
  return rep;
}

void dump_state(const std::string& stem, const SurfaceState& s, const SpectralGrid& g, const PhysicalParams& p,
                double time) {
  check_length(s.zeta, g, "zeta");
  check_length(s.psi, g, "psi");
  nlohmann::json h;
  h["grid"] = {{"L", g.length()}, {"n", g.size()}};
  h["params"] = {{"epsilon", p.epsilon}, {"mu", p.mu}, {"gamma", p.gamma}, {"h_min", p.h_min}, {"a0", p.a0}};
  h["time"] = time;
  h["layout"] = "zeta then psi, little-endian float64";
  h["data"] = stem.substr(stem.find_last_of('/') + 1) + ".bin";
  auto write_atomic = [](const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw IoError("cannot write " + tmp);
      f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!f) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path);
  };
  std::string bin;
  bin.reserve(16 * g.size());
  auto put = [&](const Vec& v) {
    for (double d : v) {
      unsigned char b[8];
      uint64_t u;
      std::memcpy(&u, &d, 8);
      for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
      bin.append(reinterpret_cast<const char*>(b), 8);
    }
  };
  put(s.zeta);
  put(s.psi);
  write_atomic(stem + ".bin", bin);
  write_atomic(stem + ".json", h.dump(2) + "\n");
}

SurfaceState restore_state(const std::string& stem, double* L, int* n, double* time) {
  std::ifstream hf(stem + ".json");
  if (!hf) throw IoError("cannot read " + stem + ".json");
  nlohmann::json h;
  try {
    hf >> h;
  } catch (const std::exception& e) {
    throw IoError(std::string("malformed checkpoint header: ") + e.what());
  }
  const int size = h.at("grid").at("n").get<int>();
  std::ifstream bf(stem + ".bin", std::ios::binary);
  if (!bf) throw IoError("cannot read " + stem + ".bin");
  std::string bytes((std::istreambuf_iterator<char>(bf)), std::istreambuf_iterator<char>());
  if (bytes.size() != static_cast<size_t>(16) * size) throw IoError("checkpoint size does not match header");
  auto get = [&](size_t offset) {
    Vec v(size);
    for (int i = 0; i < size; ++i) {
      uint64_t u = 0;
      for (int k = 0; k < 8; ++k)
        u |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[offset + 8 * i + k])) << (8 * k);
      std::memcpy(&v[i], &u, 8);
    }
    return v;
  };
  if (L) *L = h.at("grid").at("L").get<double>();
  if (n) *n = size;
  if (time) *time = h.at("time").get<double>();
  return {get(0), get(static_cast<size_t>(8) * size)};
}

}  // namespace riglid
