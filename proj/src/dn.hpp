#pragma once
#include <memory>
#include <string>
#include <vector>

#include "fd.hpp"
#include "spectral.hpp"

namespace riglid {

// Scalar field on a strip: nx periodic columns times `levels` uniform levels
// z_j = z0 + j h, stored level-major.
struct StripField {
  int nx = 0;
  int levels = 0;
  double z0 = -1.0;
  double h = 0.0;
  Vec v;

  StripField() = default;
  StripField(int nx_, int levels_, double z0_, double h_)
      : nx(nx_), levels(levels_), z0(z0_), h(h_), v(static_cast<size_t>(nx_) * levels_, 0.0) {}
  double& at(int j, int i) { return v[static_cast<size_t>(j) * nx + i]; }
  double at(int j, int i) const { return v[static_cast<size_t>(j) * nx + i]; }
  double z(int j) const { return z0 + j * h; }
  double ztop() const { return z0 + (levels - 1) * h; }
  Vec level(int j) const { return Vec(v.begin() + static_cast<long>(j) * nx, v.begin() + static_cast<long>(j + 1) * nx); }
};

// sum_{j<=k} |Lambda^{s-j} d_z^j u|_2; z-derivatives are taken separately on
// each unit sub-strip [m, m+1] so that interfaces of an extension are not crossed
double hsk_norm(const StripField& u, const SpectralGrid& g, double s, int k);

enum class DNMode { Elliptic, Expansion1, Flat };
DNMode parse_dn_mode(const std::string& s);
std::string to_string(DNMode m);

struct DNSolution {
  StripField phi;  // potential on the flat strip (-1, 0)
  Vec G;           // G[eps zeta] psi
  Vec diff;        // G[eps zeta] psi - G_0,disc psi
  int iterations = 0;
  double rel_residual = 0.0;
};

// Dirichlet-Neumann operator by elliptic solve on the flattened strip.
// Per-wavenumber banded factorizations of the flat operator are built once and
// serve both as the direct solver at zeta = 0 and as the GMRES preconditioner.
class DNSolver {
 public:
  DNSolver(const SpectralGrid& g, double mu, int nz, double tol = 1e-12, bool dealias = true);
  ~DNSolver();
  DNSolver(const DNSolver&) = delete;
  DNSolver& operator=(const DNSolver&) = delete;

  const SpectralGrid& grid() const { return g_; }
  double mu() const { return mu_; }
  int nz() const { return nz_; }
  const VerticalOps& ops() const { return ops_; }
  const Vec& flat_symbol() const { return sigma_; }
  bool dealiased() const { return dealias_; }

  DNSolution solve(const Vec& zeta, const Vec& psi, double eps, double h_min = 0.0) const;
  Vec apply(const Vec& zeta, const Vec& psi, double eps, double h_min = 0.0) const;
  Vec flat_apply(const Vec& psi) const;

  // discrete PDE residual (rows 1..nz-1) and bottom Neumann row, physical space
  Vec pde_residual(const StripField& phi, const Vec& zeta, double eps) const;

  // Laplace problem with Neumann data at both z = 0 and z = -1, iterated from a
  // seeded guess; returns |grad Phi|_2 after / before
  double null_check(const StripField& guess, double* before = nullptr, double* after = nullptr) const;

  double grad_norm(const StripField& phi) const;

 private:
  struct Band;
  struct Coeffs;
  Coeffs coefficients(const Vec& zeta, double eps) const;
  void residual_hat(const CVec& phih, const Coeffs& c, CVec& out) const;
  void precondition(const CVec& r, CVec& out) const;
  void check_height(const Vec& zeta, double eps, double h_min) const;

  SpectralGrid g_;
  double mu_;
  int nz_;
  double tol_;
  bool dealias_;
  int kmax_;
  VerticalOps ops_;
  std::vector<std::unique_ptr<Band>> bands_;
  std::vector<Vec> profile_;  // flat solution with unit top data, per mode
  Vec sigma_;                 // discrete flat DN symbol
};

Vec dn_apply(const DNSolver& s, const Vec& zeta, const Vec& psi, double eps, DNMode mode);
Vec dn_expansion1(const Vec& zeta, const Vec& psi, double eps, double mu, const SpectralGrid& g);
Vec dn_g1(const Vec& zeta, const Vec& psi, double mu, const SpectralGrid& g);

struct TraceVelocities {
  Vec w, V;
};
TraceVelocities trace_velocities(const Vec& G, const Vec& zeta, const Vec& psi, double eps, double mu,
                                 const SpectralGrid& g);
TraceVelocities trace_velocities(const DNSolver& s, const Vec& zeta, const Vec& psi, double eps);

// -eps G(h w) - eps mu d_x(h V)
Vec dn_shape_derivative(const DNSolver& s, const Vec& zeta, const Vec& psi, const Vec& hdir, double eps);

// standalone double-Neumann check on a flat strip with a seeded guess
double rigid_lid_null_check(const SpectralGrid& g, double mu, int nz, unsigned seed, double* before = nullptr,
                            double* after = nullptr);

}  // namespace riglid
