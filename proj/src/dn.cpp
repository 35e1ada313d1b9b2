#include "dn.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"
#include "gmres.hpp"

namespace riglid {

DNMode parse_dn_mode(const std::string& s) {
  if (s == "elliptic") return DNMode::Elliptic;
  if (s == "expansion1") return DNMode::Expansion1;
  if (s == "flat") return DNMode::Flat;
  throw ConfigurationError("unknown dn_mode '" + s + "' (elliptic, expansion1, flat)");
}

std::string to_string(DNMode m) {
  switch (m) {
    case DNMode::Elliptic: return "elliptic";
    case DNMode::Expansion1: return "expansion1";
    case DNMode::Flat: return "flat";
  }
  return "?";
}

namespace {

constexpr int KL = 5, KU = 5, LDAB = 2 * KL + KU + 1;

double level_norm_sq(const Vec& f, const SpectralGrid& g, double s) {
  if (s == 0.0) {
    double a = 0;
    for (double v : f) a += v * v;
    return a * g.dx();
  }
  const double r = hs_norm(f, g, s);
  return r * r;
}

}  // namespace

double hsk_norm(const StripField& u, const SpectralGrid& g, double s, int k) {
  if (u.nx != g.size()) throw ShapeError("hsk_norm: strip width does not match grid");
  // breakpoints at integer heights
  std::vector<int> cuts{0};
  for (int j = 1; j < u.levels - 1; ++j) {
    const double z = u.z(j);
    if (std::abs(z - std::round(z)) < 1e-9 * std::max(1.0, std::abs(z))) cuts.push_back(j);
  }
  cuts.push_back(u.levels - 1);
  double total = 0;
  for (int d = 0; d <= k; ++d) {
    double acc = 0;
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
      const int ja = cuts[p], jb = cuts[p + 1], M = jb - ja;
      const int npts = std::min(d + 4 + (d % 2 == 0 ? 1 : 0), M + 1);
      if (npts <= d) throw ConfigurationError("hsk_norm: sub-strip too coarse for the requested order");
      Vec wq;
      if (M % 2 == 0) {
        wq = simpson_weights(M, u.h);
      } else {
        wq.assign(M + 1, u.h);
        wq.front() = wq.back() = u.h / 2;
      }
      for (int j = ja; j <= jb; ++j) {
        Vec lev(u.nx, 0.0);
        if (d == 0) {
          lev = u.level(j);
        } else {
          const int st = std::clamp(j - npts / 2, ja, jb - npts + 1);
          Vec xs(npts);
          for (int m = 0; m < npts; ++m) xs[m] = (st + m - j) * u.h;
          const Vec w = fornberg(0.0, xs, d)[d];
          for (int m = 0; m < npts; ++m) {
            const double* src = u.v.data() + static_cast<size_t>(st + m) * u.nx;
            for (int i = 0; i < u.nx; ++i) lev[i] += w[m] * src[i];
          }
        }
        acc += wq[j - ja] * level_norm_sq(lev, g, s - d);
      }
    }
    total += std::sqrt(acc);
  }
  return total;
}

struct DNSolver::Band {
  int n = 0;
  std::vector<double> ab;
  std::vector<lapack_int> ipiv;

  explicit Band(int n_) : n(n_), ab(static_cast<size_t>(LDAB) * n_, 0.0), ipiv(n_) {}
  void set(int i, int j, double v) {
    if (i - j > KL || j - i > KU) throw SolverError("band storage overflow");
    ab[static_cast<size_t>(KL + KU + i - j) + static_cast<size_t>(j) * LDAB] += v;
  }
  void factor() {
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, KL, KU, ab.data(), LDAB, ipiv.data());
    if (info != 0) throw SolverError("singular flat operator (dgbtrf info " + std::to_string(info) + ")");
  }
  // b holds two columns of length n (real and imaginary parts)
  void solve(double* b, int nrhs) const {
    LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, KL, KU, nrhs, ab.data(), LDAB, ipiv.data(), b, n);
  }
};

struct DNSolver::Coeffs {
  double eps = 0;
  Vec hgt, ezx;     // 1 + eps zeta, eps zeta_x
  Vec b, c, cz;     // per level: eps zeta_x (1+z), (1 + mu b^2)/h, d_z of c
  double amp = 0;   // sup |eps zeta|
};

DNSolver::DNSolver(const SpectralGrid& g, double mu, int nz, double tol, bool dealias)
    : g_(g), mu_(mu), nz_(nz), tol_(tol), dealias_(dealias), ops_(-1.0, 1.0 / nz, nz) {
  if (nz < 8) throw ConfigurationError("n_z must be at least 8");
  if (!(mu > 0 && mu <= 1)) throw ConfigurationError("mu must lie in (0, 1]");
  kmax_ = dealias ? g.size() / 3 : g.nhalf() - 2;
  const int N = nz;
  sigma_.assign(g.nhalf(), 0.0);
  profile_.resize(g.nhalf());
  bands_.reserve(g.nhalf());
  for (int k = 0; k < g.nhalf(); ++k) {
    const double xi = g.xi()[k];
    auto band = std::make_unique<Band>(N);
    Vec top(N, 0.0);
    const Stencil& r0 = ops_.d1(0);
    for (size_t m = 0; m < r0.w.size(); ++m) band->set(0, r0.start + m, r0.w[m]);
    for (int j = 1; j < N; ++j) {
      const Stencil& s = ops_.d2(j);
      for (size_t m = 0; m < s.w.size(); ++m) {
        const int col = s.start + static_cast<int>(m);
        if (col == N)
          top[j] = s.w[m];
        else
          band->set(j, col, s.w[m]);
      }
      band->set(j, j, -mu * xi * xi);
    }
    band->factor();
    Vec p(N);
    for (int j = 0; j < N; ++j) p[j] = -top[j];
    band->solve(p.data(), 1);
    p.push_back(1.0);
    const Stencil& rt = ops_.d1(N);
    double sg = 0;
    for (size_t m = 0; m < rt.w.size(); ++m) sg += rt.w[m] * p[rt.start + m];
    sigma_[k] = sg;
    profile_[k] = std::move(p);
    bands_.push_back(std::move(band));
  }
}

DNSolver::~DNSolver() = default;

void DNSolver::check_height(const Vec& zeta, double eps, double h_min) const {
  double hmin = 1e300;
  for (double z : zeta) hmin = std::min(hmin, 1 + eps * z);
  if (!(hmin > 0) || hmin < h_min)
    throw PreconditionError("water height violation: min(1 + eps zeta) = " + std::to_string(hmin) +
                            " below h_min = " + std::to_string(std::max(h_min, 0.0)));
}

DNSolver::Coeffs DNSolver::coefficients(const Vec& zeta, double eps) const {
  const int nx = g_.size(), L = nz_ + 1;
  Coeffs c;
  c.eps = eps;
  const Vec zx = deriv(zeta, g_);
  c.hgt.resize(nx);
  c.ezx.resize(nx);
  for (int i = 0; i < nx; ++i) {
    c.hgt[i] = 1 + eps * zeta[i];
    c.ezx[i] = eps * zx[i];
    c.amp = std::max(c.amp, std::abs(eps * zeta[i]));
  }
  c.b.resize(static_cast<size_t>(L) * nx);
  c.c.resize(c.b.size());
  c.cz.resize(c.b.size());
  for (int j = 0; j < L; ++j) {
    const double s = 1 + ops_.z(j);
    for (int i = 0; i < nx; ++i) {
      const size_t q = static_cast<size_t>(j) * nx + i;
      const double b = c.ezx[i] * s;
      c.b[q] = b;
      c.c[q] = (1 + mu_ * b * b) / c.hgt[i];
      c.cz[q] = 2 * mu_ * b * c.ezx[i] / c.hgt[i];
    }
  }
  return c;
}

// rows 1..N-1: d_x(mu h phi_x - mu b phi_z) - mu d_z(b phi_x) + d_z(c phi_z)
// row 0: the bottom Neumann row. Output keeps modes 0..kcut on levels 0..N-1.
void DNSolver::residual_hat(const CVec& phih, const Coeffs& cf, CVec& out) const {
  const int nx = g_.size(), nh = g_.nhalf(), N = nz_, L = N + 1;
  const int kc = kmax_;
  Vec phi(static_cast<size_t>(L) * nx), phix(phi.size());
  g_.inverse_many(phih.data(), phi.data(), L);
  CVec dh(phih);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < nh; ++k)
      dh[static_cast<size_t>(j) * nh + k] *= cplx(0, k == nh - 1 ? 0.0 : g_.xi()[k]);
  g_.inverse_many(dh.data(), phix.data(), L);
  const Vec phiz = ops_.apply_d1(phi, nx), phizz = ops_.apply_d2(phi, nx), phixz = ops_.apply_d1(phix, nx);
  const int rows = N - 1;
  Vec fx(static_cast<size_t>(rows) * nx), rest(fx.size());
  for (int j = 1; j < N; ++j) {
    for (int i = 0; i < nx; ++i) {
      const size_t q = static_cast<size_t>(j) * nx + i, o = static_cast<size_t>(j - 1) * nx + i;
      fx[o] = mu_ * (cf.hgt[i] * phix[q] - cf.b[q] * phiz[q]);
      rest[o] = -mu_ * (cf.ezx[i] * phix[q] + cf.b[q] * phixz[q]) + cf.c[q] * phizz[q] + cf.cz[q] * phiz[q];
    }
  }
  CVec F(static_cast<size_t>(rows) * nh), Rr(F.size());
  g_.forward_many(fx.data(), F.data(), rows);
  g_.forward_many(rest.data(), Rr.data(), rows);
  out.assign(static_cast<size_t>(N) * (kc + 1), 0.0);
  const Stencil& r0 = ops_.d1(0);
  for (int k = 0; k <= kc; ++k) {
    cplx s = 0;
    for (size_t m = 0; m < r0.w.size(); ++m) s += r0.w[m] * phih[(r0.start + m) * nh + k];
    out[k] = s;
  }
  for (int j = 1; j < N; ++j)
    for (int k = 0; k <= kc; ++k) {
      const size_t q = static_cast<size_t>(j - 1) * nh + k;
      out[static_cast<size_t>(j) * (kc + 1) + k] = cplx(0, g_.xi()[k]) * F[q] + Rr[q];
    }
}

void DNSolver::precondition(const CVec& r, CVec& out) const {
  const int N = nz_, kc = kmax_;
  out.resize(r.size());
  Vec col(2 * N);
  for (int k = 0; k <= kc; ++k) {
    for (int j = 0; j < N; ++j) {
      const cplx v = r[static_cast<size_t>(j) * (kc + 1) + k];
      col[j] = v.real();
      col[N + j] = v.imag();
    }
    bands_[k]->solve(col.data(), 2);
    for (int j = 0; j < N; ++j) out[static_cast<size_t>(j) * (kc + 1) + k] = cplx(col[j], col[N + j]);
  }
}

DNSolution DNSolver::solve(const Vec& zeta, const Vec& psi, double eps, double h_min) const {
  check_length(zeta, g_, "solve_potential");
  check_length(psi, g_, "solve_potential");
  check_height(zeta, eps, h_min);
  const int nx = g_.size(), nh = g_.nhalf(), N = nz_, L = N + 1, kc = kmax_;
  const CVec ph = g_.forward(psi);
  CVec phih(static_cast<size_t>(L) * nh);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < nh; ++k) phih[static_cast<size_t>(j) * nh + k] = profile_[k][j] * ph[k];

  const Coeffs cf = coefficients(zeta, eps);
  DNSolution sol;
  CVec phi1(static_cast<size_t>(N) * (kc + 1), 0.0);
  if (cf.amp > 0) {
    CVec r0;
    residual_hat(phih, cf, r0);
    const size_t n = 2 * r0.size();
    std::vector<double> b(n);
    for (size_t i = 0; i < r0.size(); ++i) {
      b[2 * i] = -r0[i].real();
      b[2 * i + 1] = -r0[i].imag();
    }
    CVec full(static_cast<size_t>(L) * nh), tmp, res;
    auto A = [&](const std::vector<double>& x, std::vector<double>& y) {
      std::fill(full.begin(), full.end(), cplx(0));
      for (int j = 0; j < N; ++j)
        for (int k = 0; k <= kc; ++k) {
          const size_t q = 2 * (static_cast<size_t>(j) * (kc + 1) + k);
          full[static_cast<size_t>(j) * nh + k] = cplx(x[q], x[q + 1]);
        }
      residual_hat(full, cf, res);
      y.resize(n);
      for (size_t i = 0; i < res.size(); ++i) {
        y[2 * i] = res[i].real();
        y[2 * i + 1] = res[i].imag();
      }
    };
    auto M = [&](const std::vector<double>& x, std::vector<double>& y) {
      tmp.resize(x.size() / 2);
      for (size_t i = 0; i < tmp.size(); ++i) tmp[i] = cplx(x[2 * i], x[2 * i + 1]);
      CVec o;
      precondition(tmp, o);
      y.resize(x.size());
      for (size_t i = 0; i < o.size(); ++i) {
        y[2 * i] = o[i].real();
        y[2 * i + 1] = o[i].imag();
      }
    };
    std::vector<double> y(n, 0.0);
    const GmresStats st = gmres(A, M, b, y, tol_);
    if (!st.converged)
      throw SolverError("DN solve did not converge: relative residual " + std::to_string(st.rel_residual) +
                        " after " + std::to_string(st.iterations) + " iterations");
    for (size_t i = 0; i < phi1.size(); ++i) phi1[i] = cplx(y[2 * i], y[2 * i + 1]);
    sol.iterations = st.iterations;
    sol.rel_residual = st.rel_residual;
  }

  // total potential
  CVec tot(phih);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= kc; ++k) tot[static_cast<size_t>(j) * nh + k] += phi1[static_cast<size_t>(j) * (kc + 1) + k];
  sol.phi = StripField(nx, L, -1.0, 1.0 / N);
  g_.inverse_many(tot.data(), sol.phi.v.data(), L);

  // conormal trace, split so that the flat discrete part cancels exactly
  CVec s0(nh), s1(nh, 0.0);
  for (int k = 0; k < nh; ++k) s0[k] = sigma_[k] * ph[k];
  const Stencil& rt = ops_.d1(N);
  for (int k = 0; k <= kc; ++k)
    for (size_t m = 0; m < rt.w.size(); ++m) {
      const int j = rt.start + static_cast<int>(m);
      if (j < N) s1[k] += rt.w[m] * phi1[static_cast<size_t>(j) * (kc + 1) + k];
    }
  const Vec g0 = g_.inverse(s0), p1z = g_.inverse(s1), px = deriv(psi, g_);
  Vec diff(nx);
  for (int i = 0; i < nx; ++i) {
    const double q = (1 + mu_ * cf.ezx[i] * cf.ezx[i]) / cf.hgt[i];
    diff[i] = p1z[i] * q + g0[i] * (q - 1) - mu_ * cf.ezx[i] * px[i];
  }
  if (dealias_) diff = dealias(diff, g_);
  sol.diff = diff;
  sol.G.resize(nx);
  for (int i = 0; i < nx; ++i) sol.G[i] = g0[i] + diff[i];
  return sol;
}

Vec DNSolver::apply(const Vec& zeta, const Vec& psi, double eps, double h_min) const {
  return solve(zeta, psi, eps, h_min).G;
}

Vec DNSolver::flat_apply(const Vec& psi) const {
  CVec c = g_.forward(psi);
  apply_table(c, sigma_);
  return g_.inverse(c);
}

Vec DNSolver::pde_residual(const StripField& phi, const Vec& zeta, double eps) const {
  if (phi.nx != g_.size() || phi.levels != nz_ + 1) throw ShapeError("pde_residual: potential has the wrong shape");
  const int nh = g_.nhalf(), N = nz_, L = N + 1;
  CVec phih(static_cast<size_t>(L) * nh);
  g_.forward_many(phi.v.data(), phih.data(), L);
  const Coeffs cf = coefficients(zeta, eps);
  CVec out;
  residual_hat(phih, cf, out);
  const int kc = kmax_;
  // back to physical space on levels 0..N-1
  CVec full(static_cast<size_t>(N) * nh, 0.0);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= kc; ++k) full[static_cast<size_t>(j) * nh + k] = out[static_cast<size_t>(j) * (kc + 1) + k];
  Vec r(static_cast<size_t>(N) * g_.size());
  g_.inverse_many(full.data(), r.data(), N);
  return r;
}

double DNSolver::grad_norm(const StripField& phi) const {
  const int nx = phi.nx, L = phi.levels;
  const VerticalOps ops(phi.z0, phi.h, L - 1);
  const Vec pz = ops.apply_d1(phi.v, nx);
  const Vec wq = simpson_weights(L - 1, phi.h);
  double acc = 0;
  for (int j = 0; j < L; ++j) {
    const Vec lev = phi.level(j);
    const Vec px = deriv(lev, g_);
    double s = 0;
    for (int i = 0; i < nx; ++i) {
      const double vz = pz[static_cast<size_t>(j) * nx + i];
      s += mu_ * px[i] * px[i] + vz * vz;
    }
    acc += wq[j] * s * g_.dx();
  }
  return std::sqrt(acc);
}

double DNSolver::null_check(const StripField& guess, double* before, double* after) const {
  const int nh = g_.nhalf(), N = nz_, L = N + 1;
  if (guess.nx != g_.size() || guess.levels != L) throw ShapeError("null_check: guess has the wrong shape");
  // per-mode double-Neumann operator; mode 0 is pinned at the top for the preconditioner
  std::vector<std::unique_ptr<Band>> bands;
  auto rows = [&](int k, auto&& put) {
    const double xi = g_.xi()[k];
    for (int j = 0; j <= N; ++j) {
      const Stencil& s = (j == 0 || j == N) ? ops_.d1(j) : ops_.d2(j);
      for (size_t m = 0; m < s.w.size(); ++m) put(j, s.start + static_cast<int>(m), s.w[m]);
      if (j > 0 && j < N) put(j, j, -mu_ * xi * xi);
    }
  };
  for (int k = 0; k < nh; ++k) {
    auto b = std::make_unique<Band>(L);
    if (k == 0) {
      rows(k, [&](int i, int j, double v) {
        if (i != N) b->set(i, j, v);
      });
      b->set(N, N, 1.0);
    } else {
      rows(k, [&](int i, int j, double v) { b->set(i, j, v); });
    }
    b->factor();
    bands.push_back(std::move(b));
  }
  std::vector<std::vector<std::tuple<int, int, double>>> ent(nh);
  for (int k = 0; k < nh; ++k) rows(k, [&](int i, int j, double v) { ent[k].emplace_back(i, j, v); });

  const size_t n = 2 * static_cast<size_t>(L) * nh;
  auto idx = [&](int j, int k) { return 2 * (static_cast<size_t>(j) * nh + k); };
  auto A = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.assign(n, 0.0);
    for (int k = 0; k < nh; ++k)
      for (auto& [i, j, v] : ent[k]) {
        y[idx(i, k)] += v * x[idx(j, k)];
        y[idx(i, k) + 1] += v * x[idx(j, k) + 1];
      }
  };
  auto M = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.resize(n);
    Vec col(2 * L);
    for (int k = 0; k < nh; ++k) {
      for (int j = 0; j < L; ++j) {
        col[j] = x[idx(j, k)];
        col[L + j] = x[idx(j, k) + 1];
      }
      bands[k]->solve(col.data(), 2);
      for (int j = 0; j < L; ++j) {
        y[idx(j, k)] = col[j];
        y[idx(j, k) + 1] = col[L + j];
      }
    }
  };
  CVec gh(static_cast<size_t>(L) * nh);
  g_.forward_many(guess.v.data(), gh.data(), L);
  std::vector<double> x(n);
  for (size_t i = 0; i < gh.size(); ++i) {
    x[2 * i] = gh[i].real();
    x[2 * i + 1] = gh[i].imag();
  }
  // iterate on the correction to the seeded guess
  std::vector<double> ax;
  A(x, ax);
  std::vector<double> rhs(n);
  for (size_t i = 0; i < n; ++i) rhs[i] = -ax[i];
  std::vector<double> dx(n, 0.0);
  gmres(A, M, rhs, dx, 1e-14, 40, 400);
  for (size_t i = 0; i < n; ++i) x[i] += dx[i];
  CVec out(gh.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = cplx(x[2 * i], x[2 * i + 1]);
  StripField res(g_.size(), L, -1.0, 1.0 / N);
  g_.inverse_many(out.data(), res.v.data(), L);
  const double g0 = grad_norm(guess), g1 = grad_norm(res);
  if (before) *before = g0;
  if (after) *after = g1;
  return g0 > 0 ? g1 / g0 : g1;
}

Vec dn_g1(const Vec& zeta, const Vec& psi, double mu, const SpectralGrid& g) {
  const Vec g0p = apply_multiplier(psi, MultiplierSymbol::g0(), g, mu);
  Vec a(g.size()), b(g.size());
  const Vec px = deriv(psi, g);
  for (int i = 0; i < g.size(); ++i) {
    a[i] = zeta[i] * g0p[i];
    b[i] = zeta[i] * px[i];
  }
  const Vec t1 = apply_multiplier(a, MultiplierSymbol::g0(), g, mu), t2 = deriv(b, g);
  Vec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = -t1[i] - mu * t2[i];
  return out;
}

Vec dn_expansion1(const Vec& zeta, const Vec& psi, double eps, double mu, const SpectralGrid& g) {
  Vec out = apply_multiplier(psi, MultiplierSymbol::g0(), g, mu);
  const Vec g1 = dn_g1(zeta, psi, mu, g);
  for (int i = 0; i < g.size(); ++i) out[i] += eps * g1[i];
  return out;
}

Vec dn_apply(const DNSolver& s, const Vec& zeta, const Vec& psi, double eps, DNMode mode) {
  switch (mode) {
    case DNMode::Elliptic: return s.apply(zeta, psi, eps);
    case DNMode::Expansion1: return dn_expansion1(zeta, psi, eps, s.mu(), s.grid());
    case DNMode::Flat: return apply_multiplier(psi, MultiplierSymbol::g0(), s.grid(), s.mu());
  }
  return {};
}

TraceVelocities trace_velocities(const Vec& G, const Vec& zeta, const Vec& psi, double eps, double mu,
                                 const SpectralGrid& g) {
  const Vec zx = deriv(zeta, g), px = deriv(psi, g);
  TraceVelocities tv;
  tv.w.resize(g.size());
  tv.V.resize(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double ez = eps * zx[i];
    tv.w[i] = (G[i] + mu * ez * px[i]) / (1 + mu * ez * ez);
    tv.V[i] = px[i] - ez * tv.w[i];
  }
  return tv;
}

TraceVelocities trace_velocities(const DNSolver& s, const Vec& zeta, const Vec& psi, double eps) {
  return trace_velocities(s.apply(zeta, psi, eps), zeta, psi, eps, s.mu(), s.grid());
}

Vec dn_shape_derivative(const DNSolver& s, const Vec& zeta, const Vec& psi, const Vec& hdir, double eps) {
  const SpectralGrid& g = s.grid();
  check_length(hdir, g, "dn_shape_derivative");
  const TraceVelocities tv = trace_velocities(s, zeta, psi, eps);
  Vec hw(g.size()), hv(g.size());
  for (int i = 0; i < g.size(); ++i) {
    hw[i] = hdir[i] * tv.w[i];
    hv[i] = hdir[i] * tv.V[i];
  }
  const Vec a = s.apply(zeta, hw, eps), b = deriv(hv, g);
  Vec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = -eps * a[i] - eps * s.mu() * b[i];
  return out;
}

double rigid_lid_null_check(const SpectralGrid& g, double mu, int nz, unsigned seed, double* before, double* after) {
  DNSolver s(g, mu, nz);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  StripField guess(g.size(), nz + 1, -1.0, 1.0 / nz);
  // smooth random guess: a few low modes per level
  const int kk = std::min(6, g.nhalf() - 1);
  std::vector<double> a(kk), ph(kk);
  for (int k = 0; k < kk; ++k) {
    a[k] = nd(rng);
    ph[k] = nd(rng);
  }
  for (int j = 0; j <= nz; ++j) {
    const double z = guess.z(j);
    for (int i = 0; i < g.size(); ++i) {
      double v = 0;
      for (int k = 0; k < kk; ++k) v += a[k] * std::cos(g.xi()[k] * g.nodes()[i] + ph[k] + (k + 1) * z);
      guess.at(j, i) = v;
    }
  }
  return s.null_check(guess, before, after);
}

}  // namespace riglid
