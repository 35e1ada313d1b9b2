#pragma once
#include <complex>
#include <string>
#include <vector>

namespace riglid {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

struct PhysicalParams {
  double epsilon = 0.1;
  double mu = 0.5;
  double gamma = 1.0;
  double h_min = 0.1;
  double a0 = 0.5;
  void validate() const;
};

// Periodic cell [-L/2, L/2) with n nodes. Only the half spectrum k = 0..n/2 is
// stored; c_k = (1/n) sum_j f_j exp(-2 pi i jk/n).
class SpectralGrid {
 public:
  SpectralGrid(double L, int n);

  double length() const { return L_; }
  int size() const { return n_; }
  int nhalf() const { return n_ / 2 + 1; }
  double dx() const { return L_ / n_; }
  const Vec& nodes() const { return x_; }
  const Vec& xi() const { return xi_; }
  Vec wavenumbers() const;  // full set, ordered -n/2 .. n/2-1

  CVec forward(const Vec& f) const;
  Vec inverse(const CVec& c) const;
  // batched transforms over `howmany` contiguous rows of length n
  void forward_many(const double* f, cplx* c, int howmany) const;
  void inverse_many(const cplx* c, double* f, int howmany) const;

  // 2/3-rule mask: true for retained modes
  bool retained(int k) const { return 3 * k <= n_; }

 private:
  double L_;
  int n_;
  Vec x_, xi_;
};

enum class SymbolKind { LambdaS, FracP, Omega, G0, AbsD, Custom };

struct MultiplierSymbol {
  SymbolKind kind = SymbolKind::AbsD;
  double s = 0.0;
  Vec table;  // Custom: one value per half-spectrum mode

  static MultiplierSymbol lambda(double s) { return {SymbolKind::LambdaS, s, {}}; }
  static MultiplierSymbol frac_p() { return {SymbolKind::FracP, 0.0, {}}; }
  static MultiplierSymbol omega() { return {SymbolKind::Omega, 0.0, {}}; }
  static MultiplierSymbol g0() { return {SymbolKind::G0, 0.0, {}}; }
  static MultiplierSymbol abs_d() { return {SymbolKind::AbsD, 0.0, {}}; }
  static MultiplierSymbol custom(Vec t) { return {SymbolKind::Custom, 0.0, std::move(t)}; }
};

double omega_scalar(double xi, double mu);
double g0_scalar(double xi, double mu);
double frac_p_scalar(double xi, double mu);
double symbol_value(const MultiplierSymbol& sym, double xi, double mu);
Vec symbol_table(const MultiplierSymbol& sym, const SpectralGrid& g, double mu);

Vec apply_multiplier(const Vec& f, const MultiplierSymbol& sym, const SpectralGrid& g, double mu);
void apply_table(CVec& c, const Vec& table);

// spectral derivative of order m; odd orders drop the Nyquist mode
Vec deriv(const Vec& f, const SpectralGrid& g, int m = 1);
Vec dealias(const Vec& f, const SpectralGrid& g);
void dealias_coeffs(CVec& c, const SpectralGrid& g);

double inner(const Vec& f, const Vec& h, const SpectralGrid& g);
double l2_norm(const Vec& f, const SpectralGrid& g);
double hs_norm(const Vec& f, const SpectralGrid& g, double s);
double sup_norm(const Vec& f);
// |x f'|_2; requires f concentrated in the central half of the cell
double weighted_norm(const Vec& f, const SpectralGrid& g);
double outer_mass_fraction(const Vec& f, const SpectralGrid& g);

Vec sample(const SpectralGrid& g, double (*fn)(double));
template <class F>
Vec sample_fn(const SpectralGrid& g, F fn) {
  Vec v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = fn(g.nodes()[i]);
  return v;
}

void check_length(const Vec& f, const SpectralGrid& g, const char* what);

// least-squares slope of log|y| against log x
double loglog_slope(const Vec& x, const Vec& y);

}  // namespace riglid
