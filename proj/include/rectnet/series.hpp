#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rectnet {

// One exponential term coef * e^{-aL*L - al*l} of a stationary-profile series.
struct SeriesTerm {
  double coef = 0.0;
  double aL = 0.0;
  double al = 0.0;
};

// Truncated-series evaluator for the stationary density g_{n,m}; g = g_{1,1}.
// Coefficients decay like inverse factorial squares, so evaluation stops when
// the running term drops below tol/10 and the tail is bounded by a geometric
// majorant.
class GnmDensity {
 public:
  GnmDensity(int n, int m, double tol = 1e-12);

  double operator()(double L, double l) const;

  double mass() const;       // termwise integral over the quadrant
  double moment_surface() const;  // integral of L*l*g
  double bin_mass(double L1, double L2, double l1, double l2) const;

  // Normalized marginal CDFs of the length and width coordinates.
  double marginal_len_cdf(double x) const;
  double marginal_wid_cdf(double x) const;

  int n() const { return n_; }
  int m() const { return m_; }
  double tol() const { return tol_; }
  const std::vector<SeriesTerm>& terms() const { return terms_; }

 private:
  int n_, m_;
  double tol_;
  std::vector<SeriesTerm> terms_;
};

double density_g(double L, double l, double tol = 1e-12);

// Max absolute residual of g_{n,m} against its defining recursion
//   g_{n,m} = (n+1)(m+1)/(n^2 m^2) g_{n+1,m+1} + r_{n,m}
// on a square grid [0, extent]^2 with the given step.
double gnm_fixedpoint_residual(int n, int m, double extent = 5.0, double step = 0.25,
                               double tol = 1e-12);

struct PiMoments {
  double pi_one = 0.0;   // Pi(1), series value
  double pi_h = 1.0;     // Pi(h) = 1 exactly
  double limit = 0.0;    // Pi(1) / (2 Pi(h))
};
PiMoments pi_moments(double tol = 1e-12);

// Quadrature utilities.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10);
// Nested adaptive Simpson of f(L, l) over [0,X] x [0,Y].
double integrate2d(const std::function<double(double, double)>& f, double X, double Y,
                   double tol = 1e-9);

}  // namespace rectnet
