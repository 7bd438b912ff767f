#pragma once

#include <cstdint>
#include <vector>

#include "contact/lattice.hpp"

namespace contact {

// Explicit tiny lattice for exact ground truth; at most 12 sites so the full
// 2^n state space stays manageable. States are bitmasks over the site list
// order, so fixtures are stable.
struct TinyLattice {
  std::vector<Site> sites;
  std::vector<std::pair<int, int>> edges;  // indices into sites

  static TinyLattice path(int n_sites);          // centered 1d path, odd count
  static TinyLattice box(int dim, int radius);   // centered box with nn edges

  int site_index(const Site& s) const;  // -1 when absent
  uint32_t state_count() const { return 1u << sites.size(); }
};

// Dense CTMC generator over the 2^n configurations; rows sum to zero and the
// empty configuration is absorbing.
struct RateMatrix {
  uint32_t dimension = 0;
  std::vector<double> entries;  // row-major

  double& at(uint32_t i, uint32_t j) { return entries[static_cast<size_t>(i) * dimension + j]; }
  double at(uint32_t i, uint32_t j) const {
    return entries[static_cast<size_t>(i) * dimension + j];
  }
};

RateMatrix build_generator(const TinyLattice& lattice, double lambda);

// Distribution at time t from the point mass at init, by uniformization with
// truncation error below tol.
std::vector<double> transient_distribution(const RateMatrix& q, uint32_t init, double t,
                                           double tol);

// P(target infected at or before t) from init, by making target-occupied
// states absorbing.
double hit_probability(const TinyLattice& lattice, double lambda, uint32_t init, int target_site,
                       double t, double tol);

struct OracleReport {
  bool valid = false;
  double statistic = 0.0;
  int df = 0;
  double p_value = 0.0;
  int bins = 0;
  long replicas = 0;
  bool pass = false;
  double alpha_level = 0.0;
};

struct OracleCheckOptions {
  double oracle_lambda = 0.0;  // 0 = same as the simulated lambda
  double lambda_max = 0.0;     // 0 = simulated lambda
  uint64_t base_seed = 1;
  double tol = 1e-10;
  int threads = 0;
};

// Simulates the Harris construction on the window matching the lattice and
// chi-square-compares the time-t configuration frequencies against the
// uniformized distribution. Expected counts below 5 are pooled.
OracleReport mc_vs_oracle(const TinyLattice& lattice, double lambda, double t, long replicas,
                          double alpha_level, const OracleCheckOptions& opts = {});

}  // namespace contact
