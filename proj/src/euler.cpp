#include "euler.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "errors.hpp"
#include "parallel.hpp"

namespace riglid {

Vec default_alphas(int k) {
  Vec a(k);
  for (int i = 0; i < k; ++i) a[i] = (i + 1.0) / (k + 1.0);
  return a;
}

Vec vandermonde_coeffs(int k, const Vec& alphas, double* residual) {
  if (k < 1) throw ConfigurationError("extension order k must be >= 1");
  if (static_cast<int>(alphas.size()) != k) throw ConfigurationError("need exactly k reflection rates");
  for (int i = 0; i < k; ++i) {
    if (!(alphas[i] > 0 && alphas[i] < 1)) throw ConfigurationError("reflection rates must lie in (0, 1)");
    for (int j = 0; j < i; ++j)
      if (std::abs(alphas[i] - alphas[j]) < 1e-12) throw SingularityError("repeated reflection rates");
  }
  Eigen::MatrixXd A(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) A(j, i) = std::pow(-alphas[i], j);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(k);
  const Eigen::VectorXd c = A.fullPivLu().solve(rhs);
  double res = 0;
  for (int j = 0; j < k; ++j) {
    double s = 0;
    for (int i = 0; i < k; ++i) s += c[i] * std::pow(-alphas[i], j);
    res = std::max(res, std::abs(s - 1));
  }
  if (!(res <= 1e-10)) throw SingularityError("Vandermonde residual " + std::to_string(res) + " above 1e-10");
  if (residual) *residual = res;
  return Vec(c.data(), c.data() + k);
}

ExtensionPlan make_plan(int k, int j_target, const Vec& alphas) {
  if (j_target < 1) throw ConfigurationError("target strip index must be >= 1");
  ExtensionPlan p;
  p.k = k;
  p.j_target = j_target;
  p.alphas = alphas.empty() ? default_alphas(k) : alphas;
  p.coeffs = vandermonde_coeffs(k, p.alphas, &p.residual);
  return p;
}

namespace {

constexpr int kExtInterp = 10;   // Lagrange points for reflected values
constexpr int kPullInterp = 6;   // Lagrange points for the diffeomorphism

// value at fractional level position u inside a unit sub-strip [base, base + nz].
// Weights and sums are kept in extended precision: the plan coefficients are
// large and alternate in sign, so double rounding would show up in derivatives.
void interp_row(const StripField& f, int base, int nz, double u, int npts, double c, long double* out) {
  npts = std::min(npts, nz + 1);
  int start = static_cast<int>(std::floor(u)) - (npts / 2 - 1);
  start = std::clamp(start, 0, nz + 1 - npts);
  for (int a = 0; a < npts; ++a) {
    long double w = c;
    for (int b = 0; b < npts; ++b)
      if (b != a) w *= (static_cast<long double>(u) - (start + b)) / static_cast<long double>(a - b);
    const double* src = f.v.data() + static_cast<size_t>(base + start + a) * f.nx;
    for (int i = 0; i < f.nx; ++i) out[i] += w * src[i];
  }
}

int unit_levels(const StripField& u) {
  const double r = 1.0 / u.h;
  const int nz = static_cast<int>(std::lround(r));
  if (std::abs(r - nz) > 1e-9 * r) throw ShapeError("strip spacing must divide the unit height");
  return nz;
}

}  // namespace

StripField extend_strip(const StripField& u, const ExtensionPlan& plan, int match_order) {
  if (match_order > plan.k)
    throw ConfigurationError("plan of order " + std::to_string(plan.k) + " cannot match " +
                             std::to_string(match_order) + " derivatives");
  if (static_cast<int>(plan.coeffs.size()) != plan.k) throw ConfigurationError("plan coefficients do not match k");
  const int nz = unit_levels(u);
  if (u.levels != nz + 1 || std::abs(u.z0 + 1) > 1e-12) throw ShapeError("extend_strip expects a field on (-1, 0)");
  const int J = plan.j_target, nx = u.nx;
  StripField out(nx, (2 * J + 1) * nz + 1, -1.0 - J, u.h);
  std::copy(u.v.begin(), u.v.end(), out.v.begin() + static_cast<long>(J) * nz * nx);
  for (int m = 1; m <= J; ++m) {
    // interface a = m - 1 upward, b = -m downward (output level indices)
    const int ia = (J + m) * nz, ib = (J - m + 1) * nz;
    std::vector<long double> up(nx), dn(nx);
    for (int q = 1; q <= nz; ++q) {
      std::fill(up.begin(), up.end(), 0.0L);
      std::fill(dn.begin(), dn.end(), 0.0L);
      for (int i = 0; i < plan.k; ++i) {
        const double a = plan.alphas[i], c = plan.coeffs[i];
        interp_row(out, ia - nz, nz, nz - a * q, kExtInterp, c, up.data());
        interp_row(out, ib, nz, a * q, kExtInterp, c, dn.data());
      }
      for (int x = 0; x < nx; ++x) {
        out.at(ia + q, x) = static_cast<double>(up[x]);
        out.at(ib - q, x) = static_cast<double>(dn[x]);
      }
    }
  }
  return out;
}

StripDiffeo build_diffeo(const Vec& zeta, double eps, double when) {
  StripDiffeo d;
  d.zeta = zeta;
  d.eps = eps;
  double lo = 1e300, hi = -1e300;
  for (double z : zeta) {
    lo = std::min(lo, eps * z);
    hi = std::max(hi, eps * z);
  }
  char buf[200];
  if (!(lo > -1) || !(hi < d.zs_top)) {
    std::snprintf(buf, sizeof buf, "fluid domain leaves S* = (-2, 1) at t = %.6g (eps zeta in [%.3g, %.3g])", when,
                  lo, hi);
    throw GeometryError(buf);
  }
  // S* inside Sigma(S_l): -(l+1) - l eps zeta <= -2 and l + (l+1) eps zeta >= 1
  for (int l = 1; l <= 4; ++l) {
    if (-(l + 1) - l * lo <= -2 && -(l + 1) - l * hi <= -2 && l + (l + 1) * lo >= 1) {
      d.l = l;
      return d;
    }
  }
  std::snprintf(buf, sizeof buf, "no strip S_l with l <= 4 covers S* at t = %.6g (eps zeta in [%.3g, %.3g])", when,
                lo, hi);
  throw GeometryError(buf);
}

StripField pullback(const StripField& phi, const StripDiffeo& d) {
  const int nz = unit_levels(phi), nx = phi.nx;
  const int l = static_cast<int>(std::lround(-phi.z0 - 1));
  if (l < d.l || phi.levels != (2 * l + 1) * nz + 1) throw ShapeError("pullback: source strip does not cover S*");
  if (static_cast<int>(d.zeta.size()) != nx) throw ShapeError("pullback: zeta length mismatch");
  const int Ls = static_cast<int>(std::lround((d.zs_top - d.zs_bottom) * nz)) + 1;
  StripField out(nx, Ls, d.zs_bottom, phi.h);
  for (int i = 0; i < nx; ++i) {
    const double hh = d.height(i), top = d.z_top(i);
    for (int j = 0; j < Ls; ++j) {
      const double s = (out.z(j) - top) / hh;
      // stay inside one unit sub-strip: the extension is only finitely smooth across interfaces
      int m = static_cast<int>(std::floor(s));
      m = std::clamp(m, -l - 1, l - 1);
      const int base = (m + l + 1) * nz;
      const InterpWeights iw = lagrange_weights((s - m) * nz, 0.0, 1.0, nz + 1, std::min(kPullInterp, nz + 1));
      double v = 0;
      for (size_t q = 0; q < iw.w.size(); ++q) v += iw.w[q] * phi.at(base + iw.start + static_cast<int>(q), i);
      out.at(j, i) = v;
    }
  }
  return out;
}

StripField pushforward(const StripField& Phi, const StripDiffeo& d, int nz) {
  const int nx = Phi.nx;
  StripField out(nx, nz + 1, -1.0, 1.0 / nz);
  for (int i = 0; i < nx; ++i) {
    const double hh = d.height(i), top = d.z_top(i);
    for (int j = 0; j <= nz; ++j) {
      const double z = hh * out.z(j) + top;
      const InterpWeights iw = lagrange_weights(z, Phi.z0, Phi.h, Phi.levels, kPullInterp);
      double v = 0;
      for (size_t q = 0; q < iw.w.size(); ++q) v += iw.w[q] * Phi.at(iw.start + static_cast<int>(q), i);
      out.at(j, i) = v;
    }
  }
  return out;
}

namespace {

constexpr int kPlanOrder = 6;

// d_s of an extended field, one unit sub-strip at a time; S_0 is done last so
// that its own one-sided rows win at z = -1 and z = 0
StripField strip_dz(const StripField& f, int nz) {
  StripField out(f.nx, f.levels, f.z0, f.h);
  const int units = (f.levels - 1) / nz;
  const int l = static_cast<int>(std::lround(-f.z0 - 1));
  const VerticalOps ops(0.0, f.h, nz);
  const size_t chunk = static_cast<size_t>(nz + 1) * f.nx;
  std::vector<int> order;
  for (int u = 0; u < units; ++u)
    if (u != l) order.push_back(u);
  order.push_back(l);
  for (int u : order) {
    const auto first = f.v.begin() + static_cast<long>(u) * nz * f.nx;
    const Vec part(first, first + static_cast<long>(chunk));
    const Vec d = ops.apply_d1(part, f.nx);
    std::copy(d.begin(), d.end(), out.v.begin() + static_cast<long>(u) * nz * f.nx);
  }
  return out;
}

StripField strip_dx(const StripField& f, const SpectralGrid& g) {
  StripField out(f.nx, f.levels, f.z0, f.h);
  for (int j = 0; j < f.levels; ++j) {
    const Vec d = deriv(f.level(j), g);
    std::copy(d.begin(), d.end(), out.v.begin() + static_cast<long>(j) * f.nx);
  }
  return out;
}

struct Sample {
  StripField Phi, V, w;
  Vec wbar;  // top-level phi_s / h on the sigma grid
};

Sample sample_fields(const SurfaceState& s, const DNSolver& dn, const StripDiffeo& d, const SpectralGrid& g,
                     double mu, int nz) {
  const double eps = d.eps;
  const DNSolution sol = dn.solve(s.zeta, s.psi, eps);
  const ExtensionPlan plan = make_plan(kPlanOrder, d.l);
  const StripField ext = extend_strip(sol.phi, plan);
  const StripField ps = strip_dz(ext, nz), px = strip_dx(ext, g);
  const Vec zx = deriv(s.zeta, g);
  StripField Vs(ext.nx, ext.levels, ext.z0, ext.h), ws = Vs;
  const double rm = std::sqrt(mu);
  for (int j = 0; j < ext.levels; ++j) {
    const double sig = ext.z(j);
    for (int i = 0; i < ext.nx; ++i) {
      const double hh = d.height(i), b = eps * zx[i] * (1 + sig);
      ws.at(j, i) = ps.at(j, i) / hh;
      Vs.at(j, i) = rm * (px.at(j, i) - b * ps.at(j, i) / hh);
    }
  }
  Sample out;
  out.Phi = pullback(ext, d);
  out.V = pullback(Vs, d);
  out.w = pullback(ws, d);
  const int top = (d.l + 1) * nz;
  out.wbar = ws.level(top);
  return out;
}

void require_uniform3(const Vec& times) {
  if (times.size() != 3) throw ContextError("reconstruction needs exactly three consecutive samples");
  const double a = times[1] - times[0], b = times[2] - times[1];
  if (!(a > 0) || std::abs(a - b) > 1e-9 * a) throw ContextError("reconstruction samples must be uniformly spaced");
}

}  // namespace

FluidFields reconstruct_fields(const std::vector<SurfaceState>& states, const Vec& times, const SpectralGrid& g,
                               const PhysicalParams& p, int nz) {
  if (states.size() != 3) throw ContextError("reconstruction needs three consecutive states");
  require_uniform3(times);
  const double eps = p.epsilon, mu = p.mu;
  const DNSolver dn(g, mu, nz);
  std::vector<Sample> smp;
  std::vector<StripDiffeo> diffeos;
  for (int m = 0; m < 3; ++m) {
    if (min_height(states[m].zeta, eps) < p.h_min) throw AdmissibilityError("reconstruction on an inadmissible state");
    diffeos.push_back(build_diffeo(states[m].zeta, eps, times[m]));
  }
  int l = 1;
  for (auto& d : diffeos) l = std::max(l, d.l);
  for (auto& d : diffeos) d.l = l;
  for (int m = 0; m < 3; ++m) smp.push_back(sample_fields(states[m], dn, diffeos[m], g, mu, nz));

  FluidFields f;
  f.epsilon = eps;
  f.mu = mu;
  f.strip_l = l;
  f.time = times[1];
  f.dt_orig = (times[1] - times[0]) / eps;
  f.zeta = states[1].zeta;
  f.psi = states[1].psi;
  f.Phi = smp[1].Phi;
  f.V = smp[1].V;
  f.w = smp[1].w;
  f.Phi_t = f.Phi;
  f.V_t = f.V;
  f.w_t = f.w;
  const double inv = 1.0 / (2 * f.dt_orig);
  for (size_t q = 0; q < f.Phi.v.size(); ++q) {
    f.Phi_t.v[q] = (smp[2].Phi.v[q] - smp[0].Phi.v[q]) * inv;
    f.V_t.v[q] = (smp[2].V.v[q] - smp[0].V.v[q]) * inv;
    f.w_t.v[q] = (smp[2].w.v[q] - smp[0].w.v[q]) * inv;
  }
  f.P = f.Phi;
  f.P_hydro = f.Phi;
  for (int j = 0; j < f.P.levels; ++j) {
    const double z = f.P.z(j);
    for (int i = 0; i < f.P.nx; ++i) {
      const double V = f.V.at(j, i), w = f.w.at(j, i);
      const double P = -eps * f.Phi_t.at(j, i) - eps * eps / (2 * mu) * (V * V + w * w) - z;
      f.P.at(j, i) = P;
      f.P_hydro.at(j, i) = P + z;
    }
  }
  f.zeta_t.resize(g.size());
  for (int i = 0; i < g.size(); ++i) f.zeta_t[i] = (states[2].zeta[i] - states[0].zeta[i]) * inv;
  f.wbar = smp[1].wbar;
  const Vec zx = deriv(f.zeta, g), px = deriv(f.psi, g);
  f.Vbar.resize(g.size());
  for (int i = 0; i < g.size(); ++i) f.Vbar[i] = px[i] - eps * zx[i] * f.wbar[i];
  f.pressure_trace.resize(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const InterpWeights iw = lagrange_weights(eps * f.zeta[i], f.P.z0, f.P.h, f.P.levels, kPullInterp);
    double v = 0;
    for (size_t q = 0; q < iw.w.size(); ++q) v += iw.w[q] * f.P.at(iw.start + static_cast<int>(q), i);
    f.pressure_trace[i] = v;
  }
  return f;
}

FluidFields reconstruct_fields(const Trajectory& tr, size_t index, const SpectralGrid& g, const PhysicalParams& p,
                               int nz) {
  if (index == 0 || index + 1 >= tr.states.size())
    throw ContextError("reconstruction needs samples on both sides of the index");
  return reconstruct_fields({tr.states[index - 1], tr.states[index], tr.states[index + 1]},
                            {tr.times[index - 1], tr.times[index], tr.times[index + 1]}, g, p, nz);
}

const ResidualNorm& EulerResiduals::get(const std::string& name) const {
  for (const auto& r : items)
    if (r.name == name) return r;
  throw ConfigurationError("no residual named " + name);
}

EulerResiduals euler_residuals(const FluidFields& f, const SpectralGrid& g, Scaling scaling) {
  const int nx = f.V.nx, L = f.V.levels;
  if (nx != g.size()) throw ShapeError("euler_residuals: grid mismatch");
  const double eps = f.epsilon, mu = f.mu, rm = std::sqrt(mu), h = f.V.h, dx = g.dx();
  const double sc = scaling == Scaling::RigidLid ? 1.0 / eps : 1.0;
  const VerticalOps ops(f.V.z0, h, L - 1);
  const StripField Vx = strip_dx(f.V, g), wx = strip_dx(f.w, g), Px = strip_dx(f.P, g);
  const Vec Vz = ops.apply_d1(f.V.v, nx), wz = ops.apply_d1(f.w.v, nx), Pz = ops.apply_d1(f.P.v, nx);

  double Umax = 0, Pmax = 0;
  for (size_t q = 0; q < f.V.v.size(); ++q) {
    Umax = std::max({Umax, std::abs(f.V.v[q]), std::abs(f.w.v[q])});
  }
  EulerResiduals out;
  ResidualNorm mx{"momentum_x"}, mz{"momentum_z"}, dv{"divergence"}, cu{"curl"};
  double s_mx = 0, s_mz = 0, s_dv = 0, s_cu = 0;
  for (int i = 0; i < nx; ++i) {
    const double top = eps * f.zeta[i] - 2 * h, bot = -1 + 2 * h;
    for (int j = 0; j < L; ++j) {
      const double z = f.V.z(j);
      if (z < bot - 1e-12 || z > top + 1e-12) continue;
      const size_t q = static_cast<size_t>(j) * nx + i;
      const double V = f.V.v[q], w = f.w.v[q];
      Pmax = std::max(Pmax, std::abs(f.P.v[q] + z));
      const double rx = f.V_t.v[q] + eps / mu * (V * rm * Vx.v[q] + w * Vz[q]) + rm * Px.v[q] / eps;
      const double rz = f.w_t.v[q] + eps / mu * (V * rm * wx.v[q] + w * wz[q]) + (Pz[q] + 1) / eps;
      const double d = rm * Vx.v[q] + wz[q];
      const double c = Vz[q] - rm * wx.v[q];
      mx.sup = std::max(mx.sup, sc * std::abs(rx));
      mz.sup = std::max(mz.sup, sc * std::abs(rz));
      dv.sup = std::max(dv.sup, std::abs(d));
      cu.sup = std::max(cu.sup, std::abs(c));
      s_mx += sc * sc * rx * rx;
      s_mz += sc * sc * rz * rz;
      s_dv += d * d;
      s_cu += c * c;
      ++out.interior_nodes;
    }
  }
  const double cell = dx * h;
  mx.l2 = std::sqrt(s_mx * cell);
  mz.l2 = std::sqrt(s_mz * cell);
  dv.l2 = std::sqrt(s_dv * cell);
  cu.l2 = std::sqrt(s_cu * cell);
  // momentum balances accelerations against pressure gradients of size |U|/eps
  mx.scale = mz.scale = sc * std::max(Umax, 1e-300) / eps;
  dv.scale = cu.scale = std::max(Umax, 1e-300);

  // surface conditions
  const Vec zx = deriv(f.zeta, g);
  ResidualNorm kin{"kinematic"}, bottom{"bottom"}, ptr{"surface_pressure"};
  double s_k = 0, s_b = 0, s_p = 0, ztmax = 0;
  const int jb = static_cast<int>(std::lround((-1 - f.Phi.z0) / h));
  const Stencil os = one_sided(1, 5, h, jb, +1);
  for (int i = 0; i < nx; ++i) {
    const double k = f.zeta_t[i] + eps * f.Vbar[i] * zx[i] - f.wbar[i] / mu;
    const double G = f.wbar[i] - eps * mu * zx[i] * f.Vbar[i];
    const double zcs = f.zeta_t[i] - G / mu;
    out.kinematic_vs_zcs = std::max(out.kinematic_vs_zcs, std::abs(k - zcs));
    kin.sup = std::max(kin.sup, sc * std::abs(k));
    s_k += sc * sc * k * k;
    ztmax = std::max(ztmax, std::abs(f.zeta_t[i]));
    double wb = 0;
    for (size_t m = 0; m < os.w.size(); ++m) wb += os.w[m] * f.Phi.at(os.start + static_cast<int>(m), i);
    bottom.sup = std::max(bottom.sup, std::abs(wb));
    s_b += wb * wb;
    ptr.sup = std::max(ptr.sup, std::abs(f.pressure_trace[i]));
    s_p += f.pressure_trace[i] * f.pressure_trace[i];
  }
  kin.l2 = std::sqrt(s_k * dx);
  bottom.l2 = std::sqrt(s_b * dx);
  ptr.l2 = std::sqrt(s_p * dx);
  kin.scale = sc * std::max(ztmax, 1e-300);
  bottom.scale = std::max(Umax, 1e-300);
  ptr.scale = std::max(Pmax, 1e-300);
  out.items = {mx, mz, dv, cu, kin, bottom, ptr};
  return out;
}

namespace {

EulerResiduals residuals_at(const ReconstructCase& c, int refine, double* kvz) {
  const SpectralGrid g(c.L, c.n * refine);
  PhysicalParams p;
  p.epsilon = c.epsilon;
  p.mu = c.mu;
  SolverConfig sc;
  sc.dt = c.dt / refine;
  const int steps = static_cast<int>(std::lround(c.t_mid / sc.dt));
  sc.T = (steps + 1) * sc.dt;
  sc.n_z = c.nz * refine;
  sc.monitor_every = 1;
  sc.energy_monitor = false;
  const double a = c.amplitude, w = c.width, pa = c.psi_amplitude;
  SurfaceState s0{sample_fn(g, [&](double x) { return a * std::exp(-(x / w) * (x / w)); }),
                  sample_fn(g, [&](double x) { return pa * std::exp(-(x / w) * (x / w)); })};
  const WWSolver solver(g, p, sc);
  const Trajectory tr = solver.simulate(s0);
  if (tr.aborted) throw AdmissibilityError("reconstruction run aborted: " + tr.flags.front());
  const FluidFields f = reconstruct_fields(tr, static_cast<size_t>(steps), g, p, sc.n_z);
  EulerResiduals r = euler_residuals(f, g, Scaling::Original);
  if (kvz) *kvz = std::max(*kvz, r.kinematic_vs_zcs);
  return r;
}

}  // namespace

OrderStudy euler_order_study(const ReconstructCase& c, double floor_rel) {
  OrderStudy st;
  const EulerResiduals a = residuals_at(c, 1, &st.kinematic_vs_zcs);
  const EulerResiduals b = residuals_at(c, 2, &st.kinematic_vs_zcs);
  for (size_t i = 0; i < a.items.size(); ++i) {
    const ResidualNorm &ra = a.items[i], &rb = b.items[i];
    st.names.push_back(ra.name);
    st.coarse.push_back(ra.sup);
    st.fine.push_back(rb.sup);
    st.scale.push_back(ra.scale);
    const bool fl = ra.sup <= floor_rel * ra.scale && rb.sup <= floor_rel * rb.scale;
    st.at_floor.push_back(fl);
    st.order.push_back(rb.sup > 0 && ra.sup > 0 ? std::log2(ra.sup / rb.sup) : std::numeric_limits<double>::infinity());
  }
  return st;
}

DecayReport rigid_lid_scaling_experiment(const SurfaceState& s0, const SpectralGrid& g, const PhysicalParams& p,
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
  Vec ratio;
  const double C = runs[0].wbar_sup / (eps_list[0] * eps_list[0]);
  for (size_t i = 0; i < runs.size(); ++i) {
    rep.measured.push_back(runs[i].wbar_sup);
    rep.reference.push_back(C * eps_list[i] * eps_list[i]);
    ratio.push_back(runs[i].wbar_sup / eps_list[i]);
    if (runs[i].aborted) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "aborted at epsilon = %.6g", eps_list[i]);
      rep.flags.push_back(buf);
    }
  }
  rep.slope = loglog_slope(rep.x, rep.measured);
  rep.extra = {{"wbar_over_eps", ratio}};
  return rep;
}

}  // namespace riglid
