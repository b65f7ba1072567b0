#include "rectnet/series.hpp"

#include <cmath>
#include <stdexcept>

namespace rectnet {

GnmDensity::GnmDensity(int n, int m, double tol) : n_(n), m_(m), tol_(tol) {
  if (n < 1 || m < 1) throw std::invalid_argument("indices must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const double dn = n, dm = m;
  terms_.push_back({(dn + 1) / dn, dn + 1, dm});
  terms_.push_back({(dn + 1) * (dm + 1) / (dn * dn * dm), dm + 1, dn + 1});
  double prod = 1.0;  // prod_{k=1}^{j-1} (n+k)(m+k)
  for (int j = 1; j < 400; ++j) {
    if (j > 1) prod *= (dn + j - 1) * (dm + j - 1);
    const double c1 = (dn + j + 1) * (dm + j) / (dn * dn * dm * dm * prod);
    const double c2 = (dn + j + 1) * (dm + j + 1) / (dn * dn * dm * dm * (dn + j) * prod);
    terms_.push_back({c1, dn + j + 1, dm + j});
    // iterates of the swapped residual piece keep the swapped exponents
    terms_.push_back({c2, dm + j + 1, dn + j + 1});
    if (c1 < tol * 1e-4 && c2 < tol * 1e-4) break;
  }
}

double GnmDensity::operator()(double L, double l) const {
  if (L < 0 || l < 0) throw std::invalid_argument("negative size");
  double sum = 0.0;
  for (size_t i = 0; i < terms_.size(); ++i) {
    const double v = terms_[i].coef * std::exp(-terms_[i].aL * L - terms_[i].al * l);
    sum += v;
    // coefficient ratios fall below 1/2 past the first few terms, so the
    // remainder is within twice the running term
    if (i >= 6 && v < tol_ / 10) break;
  }
  return sum;
}

double GnmDensity::mass() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef / (t.aL * t.al);
  return s;
}

double GnmDensity::moment_surface() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef / (t.aL * t.aL * t.al * t.al);
  return s;
}

double GnmDensity::bin_mass(double L1, double L2, double l1, double l2) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    s += t.coef / (t.aL * t.al) * (std::exp(-t.aL * L1) - std::exp(-t.aL * L2)) *
         (std::exp(-t.al * l1) - std::exp(-t.al * l2));
  }
  return s;
}

double GnmDensity::marginal_len_cdf(double x) const {
  if (x <= 0) return 0.0;
  double val = 0.0;
  for (const auto& t : terms_) val += t.coef / (t.aL * t.al) * (1.0 - std::exp(-t.aL * x));
  return val / mass();
}

double GnmDensity::marginal_wid_cdf(double x) const {
  if (x <= 0) return 0.0;
  double val = 0.0;
  for (const auto& t : terms_) val += t.coef / (t.aL * t.al) * (1.0 - std::exp(-t.al * x));
  return val / mass();
}

double density_g(double L, double l, double tol) { return GnmDensity(1, 1, tol)(L, l); }

double gnm_fixedpoint_residual(int n, int m, double extent, double step, double tol) {
  const GnmDensity g_nm(n, m, tol);
  const GnmDensity g_next(n + 1, m + 1, tol);
  const double dn = n, dm = m;
  const double c = (dn + 1) * (dm + 1) / (dn * dn * dm * dm);
  auto residual_density = [&](double L, double l) {
    const double r = (dn + 1) / dn * std::exp(-(dn + 1) * L - dm * l) +
                     (dn + 1) * (dm + 1) / (dn * dn * dm) *
                         std::exp(-(dm + 1) * L - (dn + 1) * l);
    return g_nm(L, l) - c * g_next(L, l) - r;
  };
  double worst = 0.0;
  for (double L = 0.0; L <= extent + 1e-12; L += step)
    for (double l = 0.0; l <= extent + 1e-12; l += step)
      worst = std::max(worst, std::abs(residual_density(L, l)));
  return worst;
}

PiMoments pi_moments(double tol) {
  PiMoments pm;
  const GnmDensity g(1, 1, tol);
  pm.pi_one = g.mass();
  pm.pi_h = 1.0;  // integral of L*l*exp(-L-l) with pi_z a probability measure
  pm.limit = pm.pi_one / (2.0 * pm.pi_h);
  return pm;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = (a + b) / 2;
  const double lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

double integrate2d(const std::function<double(double, double)>& f, double X, double Y,
                   double tol) {
  return adaptive_simpson(
      [&](double L) {
        return adaptive_simpson([&](double l) { return f(L, l); }, 0.0, Y, tol / (4 * X + 1));
      },
      0.0, X, tol);
}

}  // namespace rectnet
