#include "contact/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contact/parallel.hpp"
#include "contact/prf.hpp"
#include "contact/simulate.hpp"
#include "contact/stats.hpp"

namespace contact {

TinyLattice TinyLattice::path(int n_sites) {
  if (n_sites < 1 || n_sites > 12 || n_sites % 2 == 0)
    throw std::invalid_argument("TinyLattice::path: need odd site count in [1,12]");
  TinyLattice lat;
  int m = (n_sites - 1) / 2;
  for (int i = -m; i <= m; ++i) lat.sites.push_back(Site{i});
  for (int i = 0; i + 1 < n_sites; ++i) lat.edges.emplace_back(i, i + 1);
  return lat;
}

TinyLattice TinyLattice::box(int dim, int radius) {
  TinyLattice lat;
  Site s;
  for (int i = 0; i < dim; ++i) s[i] = -radius;
  while (true) {
    lat.sites.push_back(s);
    int i = 0;
    while (i < dim && s[i] == radius) s[i++] = -radius;
    if (i == dim) break;
    ++s[i];
  }
  if (lat.sites.size() > 12) throw std::invalid_argument("TinyLattice::box: more than 12 sites");
  for (size_t a = 0; a < lat.sites.size(); ++a)
    for (size_t b = a + 1; b < lat.sites.size(); ++b)
      if ((lat.sites[a] - lat.sites[b]).l1_norm() == 1)
        lat.edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  return lat;
}

int TinyLattice::site_index(const Site& s) const {
  for (size_t i = 0; i < sites.size(); ++i)
    if (sites[i] == s) return static_cast<int>(i);
  return -1;
}

RateMatrix build_generator(const TinyLattice& lattice, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("build_generator: lambda must be positive");
  const size_t n = lattice.sites.size();
  if (n > 12) throw std::invalid_argument("build_generator: oversized lattice");
  for (const auto& [a, b] : lattice.edges)
    if (a < 0 || b < 0 || a >= static_cast<int>(n) || b >= static_cast<int>(n))
      throw std::invalid_argument("build_generator: edge references missing site");

  // neighbor lists from the edge set
  std::vector<std::vector<int>> nbr(n);
  for (const auto& [a, b] : lattice.edges) {
    nbr[static_cast<size_t>(a)].push_back(b);
    nbr[static_cast<size_t>(b)].push_back(a);
  }

  const uint32_t states = 1u << n;
  RateMatrix q;
  q.dimension = states;
  q.entries.assign(static_cast<size_t>(states) * states, 0.0);
  for (uint32_t s = 0; s < states; ++s) {
    double total = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      if (s & (1u << i)) {
        q.at(s, s & ~(1u << i)) += 1.0;  // recovery
        total += 1.0;
      } else {
        int infected_nbrs = 0;
        for (int j : nbr[i])
          if (s & (1u << j)) ++infected_nbrs;
        if (infected_nbrs > 0) {
          double rate = lambda * infected_nbrs;
          q.at(s, s | (1u << i)) += rate;
          total += rate;
        }
      }
    }
    q.at(s, s) = -total;
  }
  return q;
}

std::vector<double> transient_distribution(const RateMatrix& q, uint32_t init, double t,
                                           double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("transient_distribution: tol must be positive");
  if (t < 0.0) throw std::invalid_argument("transient_distribution: negative t");
  const uint32_t n = q.dimension;
  if (init >= n) throw std::invalid_argument("transient_distribution: init out of range");

  std::vector<double> dist(n, 0.0);
  dist[init] = 1.0;
  if (t == 0.0) return dist;

  // uniformization rate = max diagonal magnitude
  double rate = 0.0;
  for (uint32_t i = 0; i < n; ++i) rate = std::max(rate, -q.at(i, i));
  if (rate == 0.0) return dist;

  // P = I + Q / rate
  std::vector<double> p(q.entries);
  for (size_t i = 0; i < p.size(); ++i) p[i] /= rate;
  for (uint32_t i = 0; i < n; ++i) p[static_cast<size_t>(i) * n + i] += 1.0;

  const double mu = rate * t;
  std::vector<double> out(n, 0.0);
  std::vector<double> cur = dist;
  std::vector<double> next(n, 0.0);
  double weight = std::exp(-mu);  // Poisson(mu) pmf at k = 0
  double covered = weight;
  long k = 0;
  for (;;) {
    for (uint32_t j = 0; j < n; ++j) out[j] += weight * cur[j];
    if (1.0 - covered < tol) break;
    ++k;
    // cur <- cur * P
    std::fill(next.begin(), next.end(), 0.0);
    for (uint32_t i = 0; i < n; ++i) {
      double ci = cur[i];
      if (ci == 0.0) continue;
      const double* row = &p[static_cast<size_t>(i) * n];
      for (uint32_t j = 0; j < n; ++j) next[j] += ci * row[j];
    }
    cur.swap(next);
    weight *= mu / static_cast<double>(k);
    covered += weight;
    if (k > 100000) throw std::runtime_error("transient_distribution: truncation did not converge");
  }
  return out;
}

double hit_probability(const TinyLattice& lattice, double lambda, uint32_t init, int target_site,
                       double t, double tol) {
  if (target_site < 0 || target_site >= static_cast<int>(lattice.sites.size()))
    throw std::invalid_argument("hit_probability: target out of range");
  RateMatrix q = build_generator(lattice, lambda);
  const uint32_t bit = 1u << target_site;
  // make target-occupied states absorbing
  for (uint32_t s = 0; s < q.dimension; ++s)
    if (s & bit)
      for (uint32_t j = 0; j < q.dimension; ++j) q.at(s, j) = 0.0;
  std::vector<double> dist = transient_distribution(q, init, t, tol);
  double mass = 0.0;
  for (uint32_t s = 0; s < q.dimension; ++s)
    if (s & bit) mass += dist[s];
  return mass;
}

namespace {

// the lattice must be exactly a centered box (d=1 paths included) so that the
// simulator window has the same edge set
int embed_radius(const TinyLattice& lattice, int* dim_out) {
  int dim = 1;
  int radius = 0;
  for (const Site& s : lattice.sites) {
    for (int i = 0; i < kMaxDim; ++i)
      if (s[i] != 0) dim = std::max(dim, i + 1);
    radius = std::max(radius, static_cast<int>(s.sup_norm()));
  }
  TinyLattice ref = TinyLattice::box(dim, radius);
  std::vector<Site> a = lattice.sites, b = ref.sites;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw std::invalid_argument("mc_vs_oracle: lattice is not a centered box");
  auto canon = [&](const TinyLattice& l) {
    std::vector<std::pair<Site, Site>> es;
    for (const auto& [i, j] : l.edges) {
      Site u = l.sites[static_cast<size_t>(i)], v = l.sites[static_cast<size_t>(j)];
      if (v < u) std::swap(u, v);
      es.emplace_back(u, v);
    }
    std::sort(es.begin(), es.end());
    return es;
  };
  if (canon(lattice) != canon(ref))
    throw std::invalid_argument("mc_vs_oracle: lattice edges are not the box edges");
  *dim_out = dim;
  return radius;
}

}  // namespace

OracleReport mc_vs_oracle(const TinyLattice& lattice, double lambda, double t, long replicas,
                          double alpha_level, const OracleCheckOptions& opts) {
  OracleReport rep;
  rep.replicas = replicas;
  rep.alpha_level = alpha_level;
  if (replicas <= 0) return rep;  // degenerate report, flagged invalid

  int dim = 1;
  const int radius = embed_radius(lattice, &dim);
  const int origin_idx = lattice.site_index(Site::origin());
  if (origin_idx < 0) throw std::invalid_argument("mc_vs_oracle: lattice has no origin");

  const double oracle_lambda = opts.oracle_lambda > 0.0 ? opts.oracle_lambda : lambda;
  const double lambda_max = opts.lambda_max > 0.0 ? opts.lambda_max : lambda;
  RateMatrix q = build_generator(lattice, oracle_lambda);
  const uint32_t init = 1u << origin_idx;
  std::vector<double> expected_p = transient_distribution(q, init, t, opts.tol);

  const Window window{radius, BoundaryPolicy::cutoff};
  std::vector<uint32_t> outcome(static_cast<size_t>(replicas), 0);
  parallel_for(
      replicas,
      [&](long i) {
        HarrisField f(prf::derive_seed(opts.base_seed, static_cast<uint64_t>(i)), dim, lambda_max);
        Trajectory traj = simulate(f, lambda, {Site::origin()}, window, t);
        uint32_t state = 0;
        for (const Site& s : traj.final_config)
          state |= 1u << lattice.site_index(s);
        outcome[static_cast<size_t>(i)] = state;
      },
      opts.threads);

  std::vector<long> observed(lattice.state_count(), 0);
  for (uint32_t s : outcome) ++observed[s];
  std::vector<double> expected(expected_p.size());
  for (size_t s = 0; s < expected.size(); ++s)
    expected[s] = expected_p[s] * static_cast<double>(replicas);

  stats::Gof gof = stats::chi_square_gof(observed, expected);
  rep.valid = true;
  rep.statistic = gof.statistic;
  rep.df = gof.df;
  rep.p_value = gof.p_value;
  rep.bins = gof.bins;
  rep.pass = gof.p_value > alpha_level;
  return rep;
}

}  // namespace contact
