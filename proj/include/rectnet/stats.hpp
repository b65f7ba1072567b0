#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace rectnet {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};
MeanSE mean_se(const std::vector<double>& xs);

// Two-sided one-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic p-value Q(sqrt(n) D) from the Kolmogorov distribution.
double kolmogorov_q(double lambda);
double ks_pvalue(double d, size_t n);

struct KsResult {
  double d = 0.0;
  double p = 0.0;
  size_t n = 0;
};
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Pearson chi-square against expected counts; bins with expectation below
// `min_expected` are pooled left-to-right before testing.
struct Chi2Result {
  double stat = 0.0;
  double p = 0.0;
  size_t dof = 0;
};
Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                    size_t fitted_params = 0, double min_expected = 5.0);

double regularized_gamma_p(double a, double x);  // P(a,x), lower
double chi2_sf(double x, double k);              // upper tail of chi^2_k

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(size_t successes, size_t n, double z = 1.959963984540054);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Histogram bin edges: leading 0, then geometric spacing to `hi`.
std::vector<double> geometric_bin_edges(double first_positive, double hi, size_t bins);
std::vector<size_t> histogram_counts(const std::vector<double>& xs,
                                     const std::vector<double>& edges);

}  // namespace rectnet
