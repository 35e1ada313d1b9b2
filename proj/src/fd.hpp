#pragma once
#include <vector>

namespace riglid {

using Vec = std::vector<double>;

// Fornberg's algorithm: weights w[d][j] for derivative orders d = 0..m at x0
std::vector<Vec> fornberg(double x0, const Vec& xs, int m);

struct Stencil {
  int start = 0;
  Vec w;
};

// Uniform levels z_j = z0 + j h, j = 0..N. Centered five-point rows inside,
// six-point one-sided windows on the two rows nearest each end.
class VerticalOps {
 public:
  VerticalOps(double z0, double h, int N);

  int levels() const { return N_ + 1; }
  int intervals() const { return N_; }
  double h() const { return h_; }
  double z(int j) const { return z0_ + j * h_; }
  const Stencil& d1(int j) const { return d1_[j]; }
  const Stencil& d2(int j) const { return d2_[j]; }

  // fields stored level-major: f[j * nx + i]
  Vec apply_d1(const Vec& f, int nx) const;
  Vec apply_d2(const Vec& f, int nx) const;
  // one row of d1 applied to all columns
  Vec row_d1(const Vec& f, int nx, int j) const;

 private:
  double z0_, h_;
  int N_;
  std::vector<Stencil> d1_, d2_;
};

// one-sided estimate of the d-th derivative at node `at` using `npts` nodes
// going away from it in direction dir (+1 upward, -1 downward)
Stencil one_sided(int d, int npts, double h, int at, int dir);

// Lagrange interpolation on a uniform column (npts nodes nearest to z)
struct InterpWeights {
  int start = 0;
  Vec w;
};
InterpWeights lagrange_weights(double z, double z0, double h, int levels, int npts);

// Simpson weights on N intervals (N even), spacing h
Vec simpson_weights(int N, double h);

}  // namespace riglid
