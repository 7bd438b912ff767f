#include "contact/stats.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contact::stats {

MeanSE mean_stderr(std::span<const double> xs) {
  MeanSE out;
  out.n = xs.size();
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  double var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

double binomial_stderr(double p_hat, long n) {
  if (n <= 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

double chi_square_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  return gsl_sf_gamma_inc_Q(0.5 * static_cast<double>(df), 0.5 * x);
}

Gof chi_square_gof(std::span<const long> observed, std::span<const double> expected,
                   double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  std::vector<long> obs_bins;
  std::vector<double> exp_bins;
  long o_acc = 0;
  double e_acc = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= min_expected) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
      o_acc = 0;
      e_acc = 0.0;
    }
  }
  // fold any remainder into the last bin
  if (e_acc > 0.0 || o_acc > 0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(o_acc);
      exp_bins.push_back(e_acc);
    } else {
      obs_bins.back() += o_acc;
      exp_bins.back() += e_acc;
    }
  }
  Gof g;
  g.bins = static_cast<int>(exp_bins.size());
  if (g.bins < 2) {
    g.df = 0;
    g.p_value = 1.0;
    return g;
  }
  for (size_t i = 0; i < exp_bins.size(); ++i) {
    double d = static_cast<double>(obs_bins[i]) - exp_bins[i];
    g.statistic += d * d / exp_bins[i];
  }
  g.df = g.bins - 1;
  g.p_value = chi_square_sf(g.statistic, g.df);
  return g;
}

double poisson_pmf(long k, double mu) {
  if (k < 0) return 0.0;
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0));
}

Gof poisson_gof(std::span<const long> counts, double mu) {
  long max_k = 0;
  for (long k : counts) max_k = std::max(max_k, k);
  const long n = static_cast<long>(counts.size());
  std::vector<long> observed(static_cast<size_t>(max_k) + 2, 0);
  for (long k : counts) ++observed[static_cast<size_t>(k)];
  std::vector<double> expected(observed.size());
  double tail = 1.0;
  for (size_t k = 0; k + 1 < observed.size(); ++k) {
    double p = poisson_pmf(static_cast<long>(k), mu);
    expected[k] = p * static_cast<double>(n);
    tail -= p;
  }
  expected.back() = std::max(0.0, tail) * static_cast<double>(n);
  return chi_square_gof(observed, expected);
}

namespace {
// Asymptotic Kolmogorov survival function with the small-sample correction.
double ks_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}
}  // namespace

Ks ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  Ks out;
  out.d = d;
  out.p_value = ks_q((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

}  // namespace contact::stats
