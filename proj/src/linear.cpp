#include "linear.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace riglid {

namespace {

double sinc(double th) {
  if (std::abs(th) < 1e-4) {
    const double t2 = th * th;
    return 1 - t2 / 6 + t2 * t2 / 120;
  }
  return std::sin(th) / th;
}

}  // namespace

LinearPropagator::LinearPropagator(const SpectralGrid& g, double mu) : g_(g), mu_(mu), om_(g.nhalf()) {
  for (int k = 0; k < g.nhalf(); ++k) om_[k] = omega_scalar(g.xi()[k], mu);
}

void LinearPropagator::block(int k, double t, double eps, double m[4]) const {
  const double tau = t / eps, th = om_[k] * tau;
  const double c = std::cos(th), s = std::sin(th);
  m[0] = c;
  m[1] = om_[k] * s;
  m[2] = -tau * sinc(th);  // sin(th)/omega without dividing by omega
  m[3] = c;
}

void LinearPropagator::apply_coeffs(CVec& zh, CVec& ph, double t, double eps) const {
  double m[4];
  for (int k = 0; k < g_.nhalf(); ++k) {
    block(k, t, eps, m);
    const cplx z = zh[k], p = ph[k];
    zh[k] = m[0] * z + m[1] * p;
    ph[k] = m[2] * z + m[3] * p;
  }
}

SurfaceState LinearPropagator::apply(const SurfaceState& s, double t, double eps) const {
  CVec zh = g_.forward(s.zeta), ph = g_.forward(s.psi);
  apply_coeffs(zh, ph, t, eps);
  return {g_.inverse(zh), g_.inverse(ph)};
}

SurfaceState propagate_linear(const SurfaceState& s, double t, double eps, double mu, const SpectralGrid& g) {
  return LinearPropagator(g, mu).apply(s, t, eps);
}

double linear_hamiltonian(const SurfaceState& s, double mu, const SpectralGrid& g) {
  const Vec gp = apply_multiplier(s.psi, MultiplierSymbol::g0(), g, mu);
  return 0.5 / mu * inner(gp, s.psi, g) + 0.5 * inner(s.zeta, s.zeta, g);
}

double wave_equation_residual(const SurfaceState& s0, double t, double eps, double mu, const SpectralGrid& g) {
  const CVec z0 = g.forward(s0.zeta), p0 = g.forward(s0.psi);
  CVec r(g.nhalf());
  for (int k = 0; k < g.nhalf(); ++k) {
    const double om = omega_scalar(g.xi()[k], mu), th = om * t / eps;
    const double c = std::cos(th), sn = std::sin(th);
    const cplx zt = z0[k] * c + om * sn * p0[k];
    // eps^2 d_t^2 of (z0 cos(th) + om p0 sin(th))
    const cplx ztt = -om * om * z0[k] * c - om * om * om * sn * p0[k];
    r[k] = ztt + g0_scalar(g.xi()[k], mu) / mu * zt;
  }
  return l2_norm(g.inverse(r), g);
}

QuadratureResult oscillatory_integral(const std::function<double(double)>& u, double a, double b, double t,
                                      double eps, double mu, double tol, int max_points) {
  if (!(b > a)) throw PreconditionError("oscillatory_integral: empty interval");
  const double tau = t / eps;
  auto trap = [&](int m, double* mass) {
    const double h = (b - a) / m;
    cplx acc = 0;
    double am = 0;
    for (int i = 1; i < m; ++i) {
      const double xi = a + i * h, v = u(xi);
      acc += std::polar(v, tau * omega_scalar(xi, mu));
      am += std::abs(v);
    }
    // endpoints carry u = 0 for a compactly supported profile; keep them for generality
    const double ua = u(a), ub = u(b);
    acc += 0.5 * (std::polar(ua, tau * omega_scalar(a, mu)) + std::polar(ub, tau * omega_scalar(b, mu)));
    am += 0.5 * (std::abs(ua) + std::abs(ub));
    if (mass) *mass = am * h;
    return acc * h;
  };
  int m = 64;
  double mass = 0;
  cplx prev = trap(m, &mass);
  while (m < max_points) {
    m *= 2;
    cplx cur = trap(m, &mass);
    if (std::abs(cur - prev) < tol * std::max(mass, 1e-300) || mass == 0.0) {
      // one extra level once settled; trapezoid is spectrally accurate here
      if (m < max_points) cur = trap(2 * m, nullptr), m *= 2;
      return {cur, m + 1};
    }
    prev = cur;
  }
  throw QuadratureError("oscillatory_integral: no convergence with " + std::to_string(max_points) + " points");
}

DecayReport weak_pairing_decay(const SurfaceState& s0, const Vec& phi, double t, const Vec& eps_list, double mu,
                               const SpectralGrid& g) {
  check_length(phi, g, "weak_pairing_decay");
  LinearPropagator lp(g, mu);
  DecayReport r;
  r.abscissa = "epsilon";
  for (double e : eps_list) {
    const SurfaceState s = lp.apply(s0, t, e);
    r.x.push_back(e);
    r.measured.push_back(std::abs(inner(s.zeta, phi, g)));
  }
  if (!r.x.empty()) {
    const double c = r.measured[0] / r.x[0];
    for (double e : r.x) r.reference.push_back(c * e);
    r.slope = loglog_slope(r.x, r.measured);
  }
  return r;
}

int padding_factor(const SpectralGrid& g, double reach) {
  int p = 1;
  while (p * g.length() < g.length() + 2 * reach) p *= 2;
  return p;
}

namespace {

Vec embed(const Vec& f, int p) {
  const int n = static_cast<int>(f.size());
  Vec out(static_cast<size_t>(n) * p, 0.0);
  std::copy(f.begin(), f.end(), out.begin() + static_cast<long>(n) * (p - 1) / 2);
  return out;
}

}  // namespace

DecayReport l2_limit_experiment(const SurfaceState& s0, double t, const Vec& eps_list, double mu,
                                const SpectralGrid& g) {
  check_length(s0.zeta, g, "l2_limit_experiment");
  check_length(s0.psi, g, "l2_limit_experiment");
  DecayReport r;
  r.abscissa = "epsilon";
  const Vec wpsi = apply_multiplier(s0.psi, MultiplierSymbol::omega(), g, mu);
  const double ref = 0.5 * (inner(s0.zeta, s0.zeta, g) + inner(wpsi, wpsi, g));
  double emin = 1.0;
  for (double e : eps_list) emin = std::min(emin, e);
  // group velocity of omega never exceeds 1
  const int p = padding_factor(g, t / emin);
  const SpectralGrid gp(p * g.length(), p * g.size());
  const SurfaceState sp{embed(s0.zeta, p), embed(s0.psi, p)};
  LinearPropagator lp(gp, mu);
  Vec dev;
  for (double e : eps_list) {
    const SurfaceState s = lp.apply(sp, t, e);
    const double q = inner(s.zeta, s.zeta, gp);
    r.x.push_back(e);
    r.measured.push_back(q);
    r.reference.push_back(ref);
    dev.push_back(ref > 0 ? std::abs(q - ref) / ref : std::abs(q));
  }
  r.extra.push_back({"deviation", dev});
  r.extra.push_back({"padding", Vec(r.x.size(), double(p))});
  r.slope = loglog_slope(r.x, dev);
  return r;
}

double dispersive_sup(const Vec& phi, double t, double mu, const SpectralGrid& g) {
  // omega is even, so cos(t omega(D)) phi and sin(t omega(D)) phi are both real
  const CVec c = g.forward(phi);
  CVec cc(c), cs(c);
  for (int k = 0; k < g.nhalf(); ++k) {
    const double th = t * omega_scalar(g.xi()[k], mu);
    cc[k] *= std::cos(th);
    cs[k] *= std::sin(th);
  }
  const Vec a = g.inverse(cc), b = g.inverse(cs);
  double m = 0;
  for (int i = 0; i < g.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
  return m;
}

double dispersive_envelope(double t, double mu) {
  const double ts = t / std::sqrt(mu);
  return std::pow(mu, -0.25) * std::pow(ts, -0.125) + std::pow(ts, -0.5);
}

DecayReport dispersive_decay_experiment(const Vec& phi, double mu, const Vec& t_list, const SpectralGrid& g) {
  check_length(phi, g, "dispersive_decay_experiment");
  for (size_t i = 1; i < t_list.size(); ++i)
    if (!(t_list[i] > t_list[i - 1])) throw PreconditionError("dispersive_decay_experiment: t_list must increase");
  DecayReport r;
  r.abscissa = "t";
  const double data = hs_norm(phi, g, 1.0) + weighted_norm(phi, g);
  for (double t : t_list) {
    r.x.push_back(t);
    r.measured.push_back(dispersive_sup(phi, t, mu, g));
  }
  if (r.x.empty()) return r;
  const double base = dispersive_envelope(r.x[0], mu) * data;
  const double c = base > 0 ? r.measured[0] / base : 0.0;
  Vec ratio;
  for (size_t i = 0; i < r.x.size(); ++i) {
    const double b = c * dispersive_envelope(r.x[i], mu) * data;
    r.reference.push_back(b);
    ratio.push_back(b > 0 ? r.measured[i] / b : 0.0);
  }
  r.extra.push_back({"ratio", ratio});
  r.extra.push_back({"calibration", Vec(r.x.size(), c)});
  r.slope = loglog_slope(r.x, r.measured);
  return r;
}

}  // namespace riglid
