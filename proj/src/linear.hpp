#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spectral.hpp"

namespace riglid {

struct SurfaceState {
  Vec zeta, psi;
};

// Exact flow of the linearized system, one 2x2 block per wavenumber.
class LinearPropagator {
 public:
  LinearPropagator(const SpectralGrid& g, double mu);

  const SpectralGrid& grid() const { return g_; }
  double mu() const { return mu_; }
  const Vec& omega() const { return om_; }

  // advance by rescaled time t; the phase is omega * t / eps
  SurfaceState apply(const SurfaceState& s, double t, double eps) const;
  void apply_coeffs(CVec& zh, CVec& ph, double t, double eps) const;
  // the 2x2 block at mode k: [[a, b], [c, d]] acting on (zeta_k, psi_k)
  void block(int k, double t, double eps, double m[4]) const;

 private:
  SpectralGrid g_;
  double mu_;
  Vec om_;
};

SurfaceState propagate_linear(const SurfaceState& s, double t, double eps, double mu, const SpectralGrid& g);

// 1/(2 mu) (G0 psi, psi) + 1/2 |zeta|^2
double linear_hamiltonian(const SurfaceState& s, double mu, const SpectralGrid& g);

// || eps^2 d_t^2 zeta + G0 zeta / mu ||_2 at time t, from the closed form
double wave_equation_residual(const SurfaceState& s0, double t, double eps, double mu, const SpectralGrid& g);

struct QuadratureResult {
  cplx value;
  int points = 0;
};

// int_a^b exp(i (t/eps) omega(xi)) u(xi) dxi for u vanishing with all derivatives at a and b
QuadratureResult oscillatory_integral(const std::function<double(double)>& u, double a, double b, double t,
                                      double eps, double mu, double tol = 1e-8, int max_points = 1 << 22);

struct DecayReport {
  std::string abscissa;
  Vec x;         // abscissae
  Vec measured;  // quantity under study
  Vec reference; // bound or limit curve
  double slope = 0.0;
  std::vector<std::pair<std::string, Vec>> extra;
  std::vector<std::string> flags;
};

DecayReport weak_pairing_decay(const SurfaceState& s0, const Vec& phi, double t, const Vec& eps_list, double mu,
                               const SpectralGrid& g);

// the cell is zero-padded so that nothing radiated up to time t wraps around
DecayReport l2_limit_experiment(const SurfaceState& s0, double t, const Vec& eps_list, double mu,
                                const SpectralGrid& g);

int padding_factor(const SpectralGrid& g, double reach);

double dispersive_sup(const Vec& phi, double t, double mu, const SpectralGrid& g);
double dispersive_envelope(double t, double mu);
DecayReport dispersive_decay_experiment(const Vec& phi, double mu, const Vec& t_list, const SpectralGrid& g);

}  // namespace riglid
