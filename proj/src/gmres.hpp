#pragma once
#include <cmath>
#include <functional>
#include <vector>

namespace riglid {

struct GmresStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

using LinOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Right-preconditioned restarted GMRES. Solves A x = b with x = M^{-1} y;
// x holds the initial guess on entry.
inline GmresStats gmres(const LinOp& A, const LinOp& Minv, const std::vector<double>& b, std::vector<double>& x,
                        double tol, int restart = 40, int max_iter = 600) {
  const size_t n = b.size();
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += a[i] * c[i];
    return s;
  };
  GmresStats st;
  const double bnorm = std::sqrt(dot(b, b));
  if (x.size() != n) x.assign(n, 0.0);
  std::vector<double> r(n), w(n), z(n);
  auto residual = [&]() {
    A(x, w);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    return std::sqrt(dot(r, r));
  };
  double beta = residual();
  const double scale = bnorm > 0 ? bnorm : (beta > 0 ? beta : 1.0);
  if (beta <= tol * scale) {
    st.converged = true;
    st.rel_residual = beta / scale;
    return st;
  }
  std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
  std::vector<double> cs(restart), sn(restart), g(restart + 1), y(restart);
  while (st.iterations < max_iter) {
    for (size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart && st.iterations < max_iter; ++j) {
      ++st.iterations;
      Minv(V[j], z);
      A(z, w);
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        for (size_t q = 0; q < n; ++q) w[q] -= H[i][j] * V[i][q];
      }
      H[j + 1][j] = std::sqrt(dot(w, w));
      if (H[j + 1][j] > 0)
        for (size_t q = 0; q < n; ++q) V[j + 1][q] = w[q] / H[j + 1][j];
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double den = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = den > 0 ? H[j][j] / den : 1.0;
      sn[j] = den > 0 ? H[j + 1][j] / den : 0.0;
      H[j][j] = den;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= tol * scale) {
        ++j;
        break;
      }
    }
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int q = i + 1; q < j; ++q) s -= H[i][q] * y[q];
      y[i] = s / H[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i)
      for (size_t q = 0; q < n; ++q) w[q] += y[i] * V[i][q];
    Minv(w, z);
    for (size_t q = 0; q < n; ++q) x[q] += z[q];
    beta = residual();
    st.rel_residual = beta / scale;
    if (beta <= tol * scale) {
      st.converged = true;
      return st;
    }
  }
  return st;
}

}  // namespace riglid
