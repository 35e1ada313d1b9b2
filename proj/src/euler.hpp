#pragma once
#include <string>
#include <utility>
#include <vector>

#include "dn.hpp"
#include "linear.hpp"
#include "solver.hpp"

namespace riglid {

struct ExtensionPlan {
  int k = 1;
  Vec alphas;
  Vec coeffs;
  int j_target = 1;
  double residual = 0.0;  // max_j |sum_i c_i (-alpha_i)^j - 1|
};

Vec default_alphas(int k);
// solves sum_i c_i (-alpha_i)^j = 1, j < k
Vec vandermonde_coeffs(int k, const Vec& alphas, double* residual = nullptr);
ExtensionPlan make_plan(int k, int j_target, const Vec& alphas = {});

// u on S_0 = (-1, 0) -> Pu on S_j = (-1-j, j); one unit layer per interface.
// match_order < 0 means "whatever the plan gives".
StripField extend_strip(const StripField& u, const ExtensionPlan& plan, int match_order = -1);

// Sigma(x, s) = (x, (1 + eps zeta) s + eps zeta); S* = (-2, 1)
struct StripDiffeo {
  Vec zeta;
  double eps = 0.0;
  int l = 1;  // source strip S_l = (-1-l, l) with S* inside Sigma(S_l)
  double zs_bottom = -2.0, zs_top = 1.0;
  double z_top(int i) const { return eps * zeta[i]; }
  double height(int i) const { return 1 + eps * zeta[i]; }
};

// `when` labels the geometry error (e.g. the trajectory time)
StripDiffeo build_diffeo(const Vec& zeta, double eps, double when = 0.0);

// phi on S_l (sigma grid) -> Phi = phi o Sigma^{-1} on the S* grid with the same spacing
StripField pullback(const StripField& phi, const StripDiffeo& d);
// Phi on S* -> phi on the sigma strip (-1, 0)
StripField pushforward(const StripField& Phi, const StripDiffeo& d, int nz);

struct FluidFields {
  StripField V, w;       // U = (sqrt(mu) Phi_x, Phi_z) on S*
  StripField V_t, w_t;   // centered time differences at fixed z (original time)
  StripField Phi, Phi_t;
  StripField P;          // Bernoulli pressure, zero trace on the free surface
  StripField P_hydro;    // P + z, trace eps zeta on the free surface
  Vec zeta, psi, zeta_t;  // zeta_t in original time
  Vec wbar, Vbar;         // surface traces of Phi_z and Phi_x
  Vec pressure_trace;     // P at z = eps zeta
  double time = 0.0;      // rescaled time of the middle sample
  double dt_orig = 0.0;   // sample spacing in original time
  double epsilon = 0.0, mu = 0.0;
  int strip_l = 1;
};

// three consecutive states at rescaled times t - dt, t, t + dt
FluidFields reconstruct_fields(const std::vector<SurfaceState>& states, const Vec& times, const SpectralGrid& g,
                               const PhysicalParams& p, int nz);
FluidFields reconstruct_fields(const Trajectory& tr, size_t index, const SpectralGrid& g, const PhysicalParams& p,
                               int nz);

enum class Scaling { Original, RigidLid };

struct ResidualNorm {
  std::string name;
  double sup = 0.0, l2 = 0.0;
  double scale = 1.0;  // field magnitude used for relative statements
};

struct EulerResiduals {
  std::vector<ResidualNorm> items;  // momentum_x, momentum_z, divergence, curl, kinematic, bottom, surface_pressure
  double kinematic_vs_zcs = 0.0;    // |kinematic - (zeta_t - G/mu)|_inf
  int interior_nodes = 0;
  const ResidualNorm& get(const std::string& name) const;
};

EulerResiduals euler_residuals(const FluidFields& f, const SpectralGrid& g, Scaling scaling = Scaling::Original);

struct ReconstructCase {
  double epsilon = 0.1, mu = 0.5;
  double L = 32.0;
  int n = 128, nz = 16;
  double dt = 0.01;     // rescaled
  double t_mid = 0.1;   // rescaled time of the middle sample
  double amplitude = 1.0, width = 2.8284271247461903, psi_amplitude = 0.0;  // a exp(-(x/w)^2)
};

struct OrderStudy {
  std::vector<std::string> names;
  Vec coarse, fine, order, scale;
  std::vector<bool> at_floor;
  double kinematic_vs_zcs = 0.0;
};

// (dt, h) and (dt/2, h/2)
OrderStudy euler_order_study(const ReconstructCase& c, double floor_rel = 1e-10);

DecayReport rigid_lid_scaling_experiment(const SurfaceState& s0, const SpectralGrid& g, const PhysicalParams& p,
                                         const SolverConfig& c, const Vec& eps_list, int jobs);

}  // namespace riglid
