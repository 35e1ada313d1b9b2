#include "fd.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace riglid {

std::vector<Vec> fornberg(double x0, const Vec& xs, int m) {
  const int n = static_cast<int>(xs.size());
  std::vector<Vec> c(m + 1, Vec(n, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

Stencil make_row(int d, int j, int start, int npts, double h) {
  Vec xs(npts);
  for (int m = 0; m < npts; ++m) xs[m] = (start + m) * h;
  auto w = fornberg(j * h, xs, d);
  return {start, w[d]};
}

}  // namespace

VerticalOps::VerticalOps(double z0, double h, int N) : z0_(z0), h_(h), N_(N) {
  if (N < 6) throw ConfigurationError("vertical grid needs at least 6 intervals");
  d1_.resize(N + 1);
  d2_.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    if (j >= 2 && j <= N - 2) {
      d1_[j] = make_row(1, j, j - 2, 5, h);
      d2_[j] = make_row(2, j, j - 2, 5, h);
    } else {
      // six-point one-sided windows; the trace row sets the accuracy of G
      d1_[j] = make_row(1, j, j < 2 ? 0 : N - 5, 6, h);
      d2_[j] = make_row(2, j, j < 2 ? 0 : N - 5, 6, h);
    }
  }
}

namespace {

Vec apply_rows(const std::vector<Stencil>& rows, const Vec& f, int nx) {
  const int L = static_cast<int>(rows.size());
  Vec out(static_cast<size_t>(L) * nx, 0.0);
  for (int j = 0; j < L; ++j) {
    double* o = out.data() + static_cast<size_t>(j) * nx;
    const Stencil& s = rows[j];
    for (size_t m = 0; m < s.w.size(); ++m) {
      const double w = s.w[m];
      const double* src = f.data() + static_cast<size_t>(s.start + m) * nx;
      for (int i = 0; i < nx; ++i) o[i] += w * src[i];
    }
  }
  return out;
}

}  // namespace

Vec VerticalOps::apply_d1(const Vec& f, int nx) const { return apply_rows(d1_, f, nx); }
Vec VerticalOps::apply_d2(const Vec& f, int nx) const { return apply_rows(d2_, f, nx); }

Vec VerticalOps::row_d1(const Vec& f, int nx, int j) const {
  Vec o(nx, 0.0);
  const Stencil& s = d1_[j];
  for (size_t m = 0; m < s.w.size(); ++m) {
    const double* src = f.data() + static_cast<size_t>(s.start + m) * nx;
    for (int i = 0; i < nx; ++i) o[i] += s.w[m] * src[i];
  }
  return o;
}

Stencil one_sided(int d, int npts, double h, int at, int dir) {
  Vec xs(npts);
  for (int m = 0; m < npts; ++m) xs[m] = dir * m * h;
  auto w = fornberg(0.0, xs, d);
  Stencil s;
  if (dir > 0) {
    s.start = at;
    s.w = w[d];
  } else {
    s.start = at - (npts - 1);
    s.w.assign(w[d].rbegin(), w[d].rend());
  }
  return s;
}

InterpWeights lagrange_weights(double z, double z0, double h, int levels, int npts) {
  const double u = (z - z0) / h;
  int start = static_cast<int>(std::floor(u)) - (npts / 2 - 1);
  start = std::clamp(start, 0, levels - npts);
  InterpWeights iw;
  iw.start = start;
  iw.w.assign(npts, 1.0);
  for (int a = 0; a < npts; ++a) {
    const double ua = start + a;
    for (int b = 0; b < npts; ++b)
      if (b != a) iw.w[a] *= (u - (start + b)) / (ua - (start + b));
  }
  return iw;
}

Vec simpson_weights(int N, double h) {
  if (N % 2) throw ConfigurationError("Simpson quadrature needs an even number of intervals");
  Vec w(N + 1);
  for (int j = 0; j <= N; ++j) w[j] = (j == 0 || j == N) ? 1.0 : (j % 2 ? 4.0 : 2.0);
  for (double& v : w) v *= h / 3;
  return w;
}

}  // namespace riglid
