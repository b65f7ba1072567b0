#include "rectnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rectnet {

MeanSE mean_se(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n == 0) return {0.0, 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(n);
  if (n == 1) return {m, 0.0};
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(n - 1);
  return {m, std::sqrt(s2 / static_cast<double>(n))};
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (i + 1) / n - f);
    d = std::max(d, f - i / n);
  }
  return d;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, size_t n) {
  return kolmogorov_q(std::sqrt(static_cast<double>(n)) * d);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  KsResult r;
  r.n = samples.size();
  r.d = ks_statistic(std::move(samples), cdf);
  r.p = ks_pvalue(r.d, r.n);
  return r;
}

namespace {

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  // Lentz's algorithm for the continued fraction of Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("bad gamma arguments");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_sf(double x, double k) {
  if (x <= 0) return 1.0;
  return 1.0 - regularized_gamma_p(k / 2.0, x / 2.0);
}

Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                    size_t fitted_params, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("observed/expected size mismatch");
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0 && !exp.empty()) {  // fold the remainder into the last bin
    obs.back() += o_acc;
    exp.back() += e_acc;
  }
  Chi2Result r;
  if (exp.size() < 2 + fitted_params) {
    r.p = 1.0;
    return r;
  }
  for (size_t i = 0; i < exp.size(); ++i) {
    const double d = obs[i] - exp[i];
    r.stat += d * d / exp[i];
  }
  r.dof = exp.size() - 1 - fitted_params;
  r.p = chi2_sf(r.stat, static_cast<double>(r.dof));
  return r;
}

std::pair<double, double> wilson_interval(size_t successes, size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  // the interval closes exactly at the boundary for degenerate counts
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  const double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ym = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fit = f.intercept + f.slope * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

std::vector<double> geometric_bin_edges(double first_positive, double hi, size_t bins) {
  if (!(first_positive > 0) || !(hi > first_positive) || bins < 2)
    throw std::invalid_argument("bad bin spec");
  std::vector<double> edges;
  edges.push_back(0.0);
  const double ratio = std::pow(hi / first_positive, 1.0 / static_cast<double>(bins - 1));
  double e = first_positive;
  for (size_t i = 0; i + 1 < bins; ++i) {
    edges.push_back(e);
    e *= ratio;
  }
  edges.push_back(hi);
  return edges;
}

std::vector<size_t> histogram_counts(const std::vector<double>& xs,
                                     const std::vector<double>& edges) {
  std::vector<size_t> counts(edges.size() - 1, 0);
  for (double x : xs) {
    if (x < edges.front() || x >= edges.back()) continue;
    const size_t i =
        static_cast<size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
    if (i < counts.size()) ++counts[i];
  }
  return counts;
}

}  // namespace rectnet
