#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "contact/essential_hitting.hpp"
#include "contact/random_field.hpp"
#include "contact/simulate.hpp"

namespace contact {

// Monte Carlo point estimate. accepted counts the survival-conditioned
// sample; flags carry caveats ("no_accepted", "hit_misses:k", ...).
struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double stderror = std::numeric_limits<double>::quiet_NaN();
  long replicas = 0;
  long accepted = 0;
  double ci_level = 0.95;
  std::vector<std::string> flags;

  bool valid() const { return accepted > 0; }
};

// Existence constants of the theory, surfaced as configuration.
// growth_constant plays C (0 means the pilot default 2*lambda);
// m1 is the subadditivity correction; hit_time_budget converts |x|_1 into a
// horizon allowance for first-infection searches.
struct TheoryConstants {
  double m1 = 10.0;
  double growth_constant = 0.0;
  double hit_time_budget = 6.0;
};

struct RunParams {
  int dimension = 1;
  double lambda_max = 3.0;
  uint64_t base_seed = 1;
  long replicas = 1000;
  double horizon = 0.0;    // 0 = auto
  int window_radius = 0;   // 0 = auto
  SurvivalPolicy survival{};
  TheoryConstants constants{};
  long min_accepted = 20;
  int boundary_retry_cap = 3;
  double ci_level = 0.95;
  int threads = 0;
};

// Fraction of seeds whose origin run passes the survival proxy.
Estimate estimate_survival(double lambda, const RunParams& params);

// Sample mean of t_lambda(n x)/n over accepted runs.
Estimate estimate_mu_direct(double lambda, const Site& x, int n, const RunParams& params);

struct SubadditiveEstimate {
  Estimate estimate;
  int best_n = 0;
  std::vector<double> sequence;        // (m1 + mean sigma(n x)) / n for n = 1..n_max
  std::vector<double> sequence_stderr;
  std::vector<long> regenerated;       // accepted & regenerated count per n
};

// The infimum form: min over n of (m1 + mean sigma_lambda(n x)) / n.
SubadditiveEstimate estimate_mu_subadditive(double lambda, const Site& x, int n_max,
                                            const RunParams& params);

struct OccupancyGrid {
  double t = 0.0;  // radii scale; cells are unit boxes at sites of H_t
  std::unordered_map<Site, double, SiteHash> frequency;
};

// Directional radii of the scaled infected region H~_t / t averaged over
// accepted runs. Directions are unit vectors for |.|_1.
struct ShapeEstimate {
  double lambda = 0.0;
  double t = 0.0;
  std::vector<std::vector<double>> directions;
  std::vector<double> radii;
  std::vector<double> radii_stderr;
  long replicas = 0;
  long accepted = 0;
  std::vector<std::string> flags;
  std::optional<OccupancyGrid> occupancy;
};

std::vector<std::vector<double>> default_directions(int dim);

ShapeEstimate shape_estimate(double lambda, double t, const RunParams& params,
                             std::vector<std::vector<double>> directions = {},
                             bool occupancy = false);

// Hausdorff distance between the polyhedral reconstructions (convex hulls of
// radius * direction), under the sup norm. Supported for d <= 2.
double hausdorff_distance(const ShapeEstimate& a, const ShapeEstimate& b);

// Sup-norm Hausdorff distance between convex hulls of two point sets (d <= 2).
double hausdorff_distance_points(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b);

struct ScanRow {
  double lambda = 0.0;
  std::vector<Estimate> mu;  // one per direction
};

struct ScanDiagnostics {
  long per_seed_violations = 0;   // exact coupling monotonicity failures
  long ci_violations = 0;         // adjacent means out of order beyond 3 se
  std::vector<double> max_adjacent_jump;         // per direction
  std::vector<double> max_adjacent_jump_stderr;  // combined se of that pair
};

struct ScanTable {
  std::vector<Site> directions;
  int n = 0;
  std::vector<ScanRow> rows;
  ScanDiagnostics diagnostics;
};

// Runs estimate_mu_direct on a lambda grid with matched seeds: one coupled
// replay per seed serves every lambda, so per-seed monotonicity in lambda is
// exact by construction and is re-checked here.
ScanTable continuity_scan(const std::vector<double>& lambda_grid,
                          const std::vector<Site>& directions, int n, const RunParams& params);

struct IdemEstimate {
  Estimate p;
  double analytic_lower_bound = 0.0;  // 1 - |S| t |lambda - lambda'|
  double exact_value = 1.0;           // exp(-|S| t |lambda - lambda'|)
};

IdemEstimate idem_probability(const std::vector<ClockKey>& S, double t, double lambda,
                              double lambda_prime, long replicas, const RunParams& params);

struct GoodGrowthParams {
  double alpha = 0.5;
  int L = 5;
  int N = 10;
  double epsilon = 0.2;
  double t0_step = 0.5;
};

// Empirical probability of the good-growth event relative to the space-time
// box [-N,N]^d x [0,2N]: descendants of every box point (x0,t0) stay in
// x0 + (1+eps)(alpha L N - t0) * reference shape at the final time, and in
// (-LN, LN)^d throughout. Requires alpha * L >= 2.
Estimate good_growth_probability(double lambda, double lambda0, const ShapeEstimate& reference,
                                 const GoodGrowthParams& gg, long replicas,
                                 const RunParams& params);

// Edge count of the event's determining region (the open confinement box),
// for the lemma-style continuity budget |S| * (alpha L N) * delta.
long good_growth_determining_edges(int dim, int L, int N);

}  // namespace contact
