#pragma once
#include <memory>
#include <string>
#include <vector>

#include "dn.hpp"
#include "linear.hpp"

namespace riglid {

struct SolverConfig {
  double dt = 1e-3;  // rescaled time
  double T = 1.0;
  DNMode dn_mode = DNMode::Elliptic;
  int n_z = 32;
  bool dealias = true;
  int monitor_every = 1;
  int N = 3;
  int max_halvings = 4;
  bool zero_nonlinear = false;  // exact linear flow through the same stepper
  bool energy_monitor = true;
  void validate() const;
};

struct Trajectory {
  Vec times;
  std::vector<SurfaceState> states;
  Vec hamiltonian;            // as printed: (G psi, psi)/(2 mu) + (zeta, zeta)
  Vec hamiltonian_conserved;  // half weight on |zeta|^2
  Vec energy;                 // E^N
  Vec min_height;
  std::vector<std::string> flags;
  bool aborted = false;
  int steps = 0;
};

struct GoodUnknowns {
  std::vector<Vec> zeta_a, psi_a;  // alpha = 0..N
};

class WWSolver {
 public:
  WWSolver(const SpectralGrid& g, const PhysicalParams& p, const SolverConfig& c);

  const SpectralGrid& grid() const { return g_; }
  const PhysicalParams& params() const { return p_; }
  const SolverConfig& config() const { return c_; }
  const DNSolver& dn() const { return *dn_; }
  const LinearPropagator& propagator() const { return lp_; }

  // full tendency (1/eps)(G psi/mu, -zeta - eps/2 psi_x^2 + ...)
  SurfaceState rhs(const SurfaceState& s) const;
  // nonlinear remainder F driving the integrating-factor stepper
  SurfaceState nonlinear(const SurfaceState& s) const;
  SurfaceState step(const SurfaceState& s, double dt) const;
  Trajectory simulate(const SurfaceState& s0) const;

  Vec dn_apply(const SurfaceState& s) const;  // G psi in the configured mode
  double hamiltonian(const SurfaceState& s) const;
  double hamiltonian_conserved(const SurfaceState& s) const;
  GoodUnknowns good_unknowns(const SurfaceState& s, int N) const;
  double energy_EN(const SurfaceState& s, int N) const;
  // time-derivative variant: centered differences on the stored trajectory
  double energy_EN_time(const Trajectory& tr, size_t index, int N) const;
  Vec rayleigh_taylor(const Trajectory& tr, size_t index) const;
  double rayleigh_taylor_initial(const SurfaceState& s) const;

 private:
  struct Coeffs {
    CVec z, p;
  };
  Coeffs to_coeffs(const SurfaceState& s) const;
  SurfaceState from_coeffs(const Coeffs& c) const;
  Coeffs F(const Coeffs& u) const;
  Coeffs step_coeffs(const Coeffs& u, double dt) const;
  Vec effective_G(const SurfaceState& s, Vec* diff) const;

  SpectralGrid g_;
  PhysicalParams p_;
  SolverConfig c_;
  std::unique_ptr<DNSolver> dn_;
  LinearPropagator lp_;
};

double min_height(const Vec& zeta, double eps);

struct GapRun {
  double epsilon = 0;
  double error = 0;     // sup_t |(dzeta, P dpsi)|_2
  int steps = 0;
  bool aborted = false;
  double wbar_sup = 0;  // |w|_inf at the final time
  double hamiltonian_drift = 0;
};

GapRun lin_vs_nonlin_run(const SurfaceState& s0, const SpectralGrid& g, PhysicalParams p, const SolverConfig& c);
DecayReport lin_vs_nonlin_experiment(const SurfaceState& s0, const SpectralGrid& g, const PhysicalParams& p,
                                     const SolverConfig& c, const Vec& eps_list, int jobs);

// checkpoint: <stem>.json header + <stem>.bin raw little-endian float64 (zeta then psi)
void dump_state(const std::string& stem, const SurfaceState& s, const SpectralGrid& g, const PhysicalParams& p,
                double time);
SurfaceState restore_state(const std::string& stem, double* L = nullptr, int* n = nullptr, double* time = nullptr);

}  // namespace riglid
