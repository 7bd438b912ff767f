#pragma once

#include <span>
#include <vector>

namespace contact::stats {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  size_t n = 0;
};

MeanSE mean_stderr(std::span<const double> xs);

// Standard error of a binomial proportion.
double binomial_stderr(double p_hat, long n);

// Survival function of the chi-square distribution.
double chi_square_sf(double x, int df);

struct Gof {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  int bins = 0;  // after pooling
};

// Pearson chi-square GOF. Consecutive categories are pooled until each bin's
// expected count reaches min_expected.
Gof chi_square_gof(std::span<const long> observed, std::span<const double> expected,
                   double min_expected = 5.0);

// Chi-square GOF of integer counts against Poisson(mu).
Gof poisson_gof(std::span<const long> counts, double mu);

struct Ks {
  double d = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
Ks ks_two_sample(std::vector<double> a, std::vector<double> b);

double poisson_pmf(long k, double mu);

}  // namespace contact::stats
