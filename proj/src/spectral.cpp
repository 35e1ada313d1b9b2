#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "errors.hpp"

namespace riglid {

void PhysicalParams::validate() const {
  if (!(epsilon > 0 && epsilon <= 1))
    throw ConfigurationError("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
  if (!(mu > 0 && mu <= 1))
    throw ConfigurationError("mu must lie in (0, 1], got " + std::to_string(mu));
  if (gamma != 1.0) throw ConfigurationError("gamma is fixed to 1 in one dimension");
  if (!(h_min > 0)) throw ConfigurationError("h_min must be > 0");
  if (!(a0 > 0)) throw ConfigurationError("a0 must be > 0");
}

namespace {

// FFTW planning is not thread safe; execution on fresh arrays is.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans;

  fftw_plan get(int n, int howmany, bool fwd) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, howmany, fwd);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    int nh = n / 2 + 1;
    double* r = fftw_alloc_real(static_cast<size_t>(n) * howmany);
    fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(nh) * howmany);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = fwd ? fftw_plan_many_dft_r2c(1, &n, howmany, r, nullptr, 1, n, c, nullptr, 1, nh, flags)
                      : fftw_plan_many_dft_c2r(1, &n, howmany, c, nullptr, 1, nh, r, nullptr, 1, n, flags);
    fftw_free(r);
    fftw_free(c);
    plans[key] = p;
    return p;
  }
};

PlanCache& cache() {
  static PlanCache pc;
  return pc;
}

}  // namespace

SpectralGrid::SpectralGrid(double L, int n) : L_(L), n_(n) {
  if (!(L > 0)) throw ConfigurationError("domain length must be positive");
  if (n < 8 || (n & (n - 1)) != 0)
    throw ConfigurationError("grid size must be a power of two >= 8, got " + std::to_string(n));
  x_.resize(n);
  for (int i = 0; i < n; ++i) x_[i] = -L / 2 + i * L / n;
  xi_.resize(nhalf());
  for (int k = 0; k < nhalf(); ++k) xi_[k] = 2 * std::numbers::pi * k / L;
}

Vec SpectralGrid::wavenumbers() const {
  Vec w(n_);
  for (int i = 0; i < n_; ++i) w[i] = 2 * std::numbers::pi * (i - n_ / 2) / L_;
  return w;
}

void SpectralGrid::forward_many(const double* f, cplx* c, int howmany) const {
  fftw_plan p = cache().get(n_, howmany, true);
  fftw_execute_dft_r2c(p, const_cast<double*>(f), reinterpret_cast<fftw_complex*>(c));
  const double s = 1.0 / n_;
  const size_t tot = static_cast<size_t>(nhalf()) * howmany;
  for (size_t i = 0; i < tot; ++i) c[i] *= s;
}

void SpectralGrid::inverse_many(const cplx* c, double* f, int howmany) const {
  fftw_plan p = cache().get(n_, howmany, false);
  // c2r clobbers its input
  CVec tmp(c, c + static_cast<size_t>(nhalf()) * howmany);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(tmp.data()), f);
}

CVec SpectralGrid::forward(const Vec& f) const {
  check_length(f, *this, "forward transform");
  CVec c(nhalf());
  forward_many(f.data(), c.data(), 1);
  return c;
}

Vec SpectralGrid::inverse(const CVec& c) const {
  if (static_cast<int>(c.size()) != nhalf()) throw ShapeError("inverse transform: coefficient count mismatch");
  Vec f(n_);
  inverse_many(c.data(), f.data(), 1);
  return f;
}

void check_length(const Vec& f, const SpectralGrid& g, const char* what) {
  if (static_cast<int>(f.size()) != g.size())
    throw ShapeError(std::string(what) + ": field has " + std::to_string(f.size()) + " samples, grid has " +
                     std::to_string(g.size()));
}

double omega_scalar(double xi, double mu) {
  const double a = std::abs(xi);
  if (a == 0.0) return 0.0;
  const double sm = std::sqrt(mu);
  return std::sqrt(a * std::tanh(sm * a) / sm);
}

double g0_scalar(double xi, double mu) {
  const double a = std::abs(xi), sm = std::sqrt(mu);
  return sm * a * std::tanh(sm * a);
}

double frac_p_scalar(double xi, double mu) {
  const double a = std::abs(xi);
  return a / std::sqrt(1 + std::sqrt(mu) * a);
}

double symbol_value(const MultiplierSymbol& sym, double xi, double mu) {
  switch (sym.kind) {
    case SymbolKind::LambdaS: return std::pow(1 + xi * xi, sym.s / 2);
    case SymbolKind::FracP: return frac_p_scalar(xi, mu);
    case SymbolKind::Omega: return omega_scalar(xi, mu);
    case SymbolKind::G0: return g0_scalar(xi, mu);
    case SymbolKind::AbsD: return std::abs(xi);
    case SymbolKind::Custom: break;
  }
  throw ConfigurationError("tabulated symbol has no scalar form");
}

Vec symbol_table(const MultiplierSymbol& sym, const SpectralGrid& g, double mu) {
  if (sym.kind == SymbolKind::Custom) {
    if (static_cast<int>(sym.table.size()) != g.nhalf())
      throw ShapeError("tabulated symbol needs one value per half-spectrum mode");
    return sym.table;
  }
  Vec t(g.nhalf());
  for (int k = 0; k < g.nhalf(); ++k) t[k] = symbol_value(sym, g.xi()[k], mu);
  return t;
}

void apply_table(CVec& c, const Vec& table) {
  for (size_t k = 0; k < c.size(); ++k) c[k] *= table[k];
}

Vec apply_multiplier(const Vec& f, const MultiplierSymbol& sym, const SpectralGrid& g, double mu) {
  check_length(f, g, "apply_multiplier");
  CVec c = g.forward(f);
  apply_table(c, symbol_table(sym, g, mu));
  return g.inverse(c);
}

Vec deriv(const Vec& f, const SpectralGrid& g, int m) {
  check_length(f, g, "deriv");
  CVec c = g.forward(f);
  const cplx i1(0, 1);
  for (int k = 0; k < g.nhalf(); ++k) c[k] *= std::pow(i1 * g.xi()[k], m);
  if (m % 2) c[g.nhalf() - 1] = 0.0;
  return g.inverse(c);
}

void dealias_coeffs(CVec& c, const SpectralGrid& g) {
  for (int k = 0; k < g.nhalf(); ++k)
    if (!g.retained(k)) c[k] = 0.0;
}

Vec dealias(const Vec& f, const SpectralGrid& g) {
  CVec c = g.forward(f);
  dealias_coeffs(c, g);
  return g.inverse(c);
}

double inner(const Vec& f, const Vec& h, const SpectralGrid& g) {
  check_length(f, g, "inner");
  check_length(h, g, "inner");
  double s = 0;
  for (int i = 0; i < g.size(); ++i) s += f[i] * h[i];
  return s * g.dx();
}

double l2_norm(const Vec& f, const SpectralGrid& g) { return std::sqrt(inner(f, f, g)); }

double hs_norm(const Vec& f, const SpectralGrid& g, double s) {
  if (s == 0.0) return l2_norm(f, g);
  CVec c = g.forward(f);
  double acc = 0;
  for (int k = 0; k < g.nhalf(); ++k) {
    const double w = (k == 0 || k == g.nhalf() - 1) ? 1.0 : 2.0;
    acc += w * std::pow(1 + g.xi()[k] * g.xi()[k], s) * std::norm(c[k]);
  }
  return std::sqrt(acc * g.length());
}

double sup_norm(const Vec& f) {
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double outer_mass_fraction(const Vec& f, const SpectralGrid& g) {
  double out = 0, tot = 0;
  const double q = g.length() / 4;
  for (int i = 0; i < g.size(); ++i) {
    tot += f[i] * f[i];
    if (std::abs(g.nodes()[i]) > q) out += f[i] * f[i];
  }
  return tot > 0 ? out / tot : 0.0;
}

double weighted_norm(const Vec& f, const SpectralGrid& g) {
  const double frac = outer_mass_fraction(f, g);
  if (frac > 1e-8)
    throw PreconditionError("weighted_norm: field not localized, mass fraction outside central half = " +
                            std::to_string(frac));
  Vec d = deriv(f, g);
  for (int i = 0; i < g.size(); ++i) d[i] *= g.nodes()[i];
  return l2_norm(d, g);
}

Vec sample(const SpectralGrid& g, double (*fn)(double)) { return sample_fn(g, fn); }

double loglog_slope(const Vec& x, const Vec& y) {
  const size_t m = x.size();
  if (m < 2 || y.size() != m) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace riglid
