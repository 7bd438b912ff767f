#include "contact/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contact/parallel.hpp"
#include "contact/prf.hpp"
#include "contact/stats.hpp"
#include "engine.hpp"

namespace contact {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double auto_growth(int dimension, double lambda, const TheoryConstants& c) {
  return c.growth_constant > 0.0 ? c.growth_constant : default_growth_constant(dimension, lambda);
}

int auto_radius(const RunParams& p, double growth, double horizon) {
  if (p.window_radius > 0) return p.window_radius;
  return static_cast<int>(std::ceil(growth * horizon)) + 2;
}

HarrisField replica_field(const RunParams& p, long i) {
  return HarrisField(prf::derive_seed(p.base_seed, static_cast<uint64_t>(i)), p.dimension,
                     p.lambda_max);
}

bool accepted_at(const detail::LayerResult& r, double t_surv) {
  return !r.extinction_time || *r.extinction_time > t_surv;
}

Estimate from_values(const std::vector<double>& vals, long replicas, long accepted,
                     const RunParams& p) {
  Estimate e;
  e.replicas = replicas;
  e.accepted = accepted;
  e.ci_level = p.ci_level;
  if (vals.empty()) {
    e.flags.push_back("no_accepted");
    return e;
  }
  auto ms = stats::mean_stderr(vals);
  e.value = ms.mean;
  e.stderror = ms.se;
  if (accepted < p.min_accepted) e.flags.push_back("low_accepted");
  return e;
}

void check_rate(double lambda, const RunParams& p) {
  if (lambda > p.lambda_max) throw std::invalid_argument("lambda > lambda_max");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

}  // namespace

Estimate estimate_survival(double lambda, const RunParams& params) {
  check_rate(lambda, params);
  const double growth = auto_growth(params.dimension, lambda, params.constants);
  std::vector<char> ok(static_cast<size_t>(params.replicas), 0);
  parallel_for(
      params.replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        ok[static_cast<size_t>(i)] =
            survival_proxy(f, lambda, Site::origin(), 0.0, params.survival, growth).survives;
      },
      params.threads);
  long survived = std::count(ok.begin(), ok.end(), 1);
  Estimate e;
  e.replicas = params.replicas;
  e.accepted = params.replicas;
  e.ci_level = params.ci_level;
  e.value = static_cast<double>(survived) / static_cast<double>(params.replicas);
  e.stderror = stats::binomial_stderr(e.value, params.replicas);
  return e;
}

Estimate estimate_mu_direct(double lambda, const Site& x, int n, const RunParams& params) {
  check_rate(lambda, params);
  if (n < 1) throw std::invalid_argument("estimate_mu_direct: n must be >= 1");
  const Site target = n * x;
  const double growth = auto_growth(params.dimension, lambda, params.constants);
  const double horizon =
      params.horizon > 0.0
          ? params.horizon
          : std::max(params.survival.t_surv,
                     params.constants.hit_time_budget * static_cast<double>(target.l1_norm()));
  const Window window{auto_radius(params, growth, horizon), BoundaryPolicy::flag};
  if (!window.contains(target, params.dimension))
    throw std::invalid_argument("estimate_mu_direct: n*x outside window");
  const double accept_time = std::min(params.survival.t_surv, horizon);

  struct Rep {
    bool accepted = false;
    double t_hit = kNaN;
  };
  std::vector<Rep> reps(static_cast<size_t>(params.replicas));
  parallel_for(
      params.replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        detail::ReplayConfig cfg;
        cfg.field = &f;
        cfg.window = window;
        cfg.horizon = horizon;
        cfg.lambdas = {lambda};
        cfg.initial = {{Site::origin(), 1}};
        cfg.record_first_hits = false;
        cfg.record_final = false;
        cfg.watch_sites = {target};
        auto layers = detail::replay(cfg);
        Rep& r = reps[static_cast<size_t>(i)];
        r.accepted = accepted_at(layers[0], accept_time);
        const auto& on = layers[0].watch.at(target).on_times;
        if (!on.empty()) r.t_hit = on.front();
      },
      params.threads);

  std::vector<double> vals;
  long accepted = 0, misses = 0;
  for (const Rep& r : reps) {
    if (!r.accepted) continue;
    ++accepted;
    if (std::isnan(r.t_hit))
      ++misses;
    else
      vals.push_back(r.t_hit / static_cast<double>(n));
  }
  Estimate e = from_values(vals, params.replicas, accepted, params);
  if (misses > 0) e.flags.push_back("hit_misses:" + std::to_string(misses));
  return e;
}

SubadditiveEstimate estimate_mu_subadditive(double lambda, const Site& x, int n_max,
                                            const RunParams& params) {
  check_rate(lambda, params);
  if (n_max < 1) throw std::invalid_argument("estimate_mu_subadditive: n_max must be >= 1");
  const Site far = n_max * x;
  const double horizon =
      params.horizon > 0.0
          ? params.horizon
          : 2.0 * params.survival.t_surv +
                params.constants.hit_time_budget * static_cast<double>(far.l1_norm());
  int radius = params.window_radius > 0
                   ? params.window_radius
                   : proxy_window_radius(params.dimension, lambda, params.survival,
                                       params.constants.growth_constant) +
                         far.sup_norm() + 2;
  const Window window{radius, BoundaryPolicy::flag};
  if (!window.contains(far, params.dimension))
    throw std::invalid_argument("estimate_mu_subadditive: n_max*x outside window");

  std::vector<Site> targets;
  for (int k = 1; k <= n_max; ++k) targets.push_back(k * x);
  std::vector<Site> watch = targets;
  std::sort(watch.begin(), watch.end());
  watch.erase(std::unique(watch.begin(), watch.end()), watch.end());

  struct Rep {
    bool accepted = false;
    std::vector<double> sigma;  // per n, NaN when not regenerated
  };
  std::vector<Rep> reps(static_cast<size_t>(params.replicas));
  parallel_for(
      params.replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        SimulateOptions opts;
        opts.watch_sites = watch;
        Trajectory base = simulate(f, lambda, {Site::origin()}, window, horizon, opts);
        Rep& r = reps[static_cast<size_t>(i)];
        r.accepted = !base.extinction_time || *base.extinction_time > params.survival.t_surv;
        if (!r.accepted) return;
        r.sigma.assign(targets.size(), kNaN);
        for (size_t k = 0; k < targets.size(); ++k) {
          HittingRecord rec = essential_hitting_with_base(base, f, targets[k], params.survival,
                                                          params.constants.growth_constant);
          if (rec.status == HitStatus::regenerated) r.sigma[k] = *rec.sigma;
        }
      },
      params.threads);

  SubadditiveEstimate out;
  out.sequence.assign(targets.size(), kNaN);
  out.sequence_stderr.assign(targets.size(), kNaN);
  out.regenerated.assign(targets.size(), 0);
  long accepted = 0;
  for (const Rep& r : reps)
    if (r.accepted) ++accepted;

  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < targets.size(); ++k) {
    std::vector<double> vals;
    for (const Rep& r : reps)
      if (r.accepted && !std::isnan(r.sigma[k])) vals.push_back(r.sigma[k]);
    out.regenerated[k] = static_cast<long>(vals.size());
    if (vals.empty()) continue;
    auto ms = stats::mean_stderr(vals);
    double nk = static_cast<double>(k + 1);
    out.sequence[k] = (params.constants.m1 + ms.mean) / nk;
    out.sequence_stderr[k] = ms.se / nk;
    if (out.sequence[k] < best) {
      best = out.sequence[k];
      out.best_n = static_cast<int>(k + 1);
    }
  }
  Estimate e;
  e.replicas = params.replicas;
  e.accepted = accepted;
  e.ci_level = params.ci_level;
  if (out.best_n > 0) {
    e.value = out.sequence[static_cast<size_t>(out.best_n - 1)];
    e.stderror = out.sequence_stderr[static_cast<size_t>(out.best_n - 1)];
    if (accepted < params.min_accepted) e.flags.push_back("low_accepted");
  } else {
    e.flags.push_back("no_accepted");
  }
  out.estimate = std::move(e);
  return out;
}

// ---------------------------------------------------------------------------
// shape geometry

namespace {

// Largest r >= 0 with r * dir inside the unit box at y, or -inf.
double ray_box_max(const Site& y, const std::vector<double>& dir, int dim) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; ++i) {
    double a = static_cast<double>(y[i]);
    double b = a + 1.0;
    double d = dir[static_cast<size_t>(i)];
    if (d > 0.0) {
      lo = std::max(lo, a / d);
      hi = std::min(hi, b / d);
    } else if (d < 0.0) {
      lo = std::max(lo, b / d);
      hi = std::min(hi, a / d);
    } else if (!(a <= 0.0 && 0.0 <= b)) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return lo <= hi ? hi : -std::numeric_limits<double>::infinity();
}

double directional_radius(const std::vector<Site>& region, const std::vector<double>& dir,
                          int dim) {
  double best = 0.0;
  for (const Site& y : region) best = std::max(best, ray_box_max(y, dir, dim));
  return best;
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

std::vector<std::vector<double>> default_directions(int dim) {
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < dim; ++i) {
    std::vector<double> plus(static_cast<size_t>(dim), 0.0), minus(static_cast<size_t>(dim), 0.0);
    plus[static_cast<size_t>(i)] = 1.0;
    minus[static_cast<size_t>(i)] = -1.0;
    dirs.push_back(plus);
    dirs.push_back(minus);
  }
  if (dim == 2) {
    for (double sx : {1.0, -1.0})
      for (double sy : {1.0, -1.0}) dirs.push_back({sx * 0.5, sy * 0.5});
  }
  return dirs;
}

ShapeEstimate shape_estimate(double lambda, double t, const RunParams& params,
                             std::vector<std::vector<double>> directions, bool occupancy) {
  check_rate(lambda, params);
  if (!(t > 0.0)) throw std::invalid_argument("shape_estimate: t must be positive");
  if (directions.empty()) directions = default_directions(params.dimension);
  for (auto& d : directions) {
    if (static_cast<int>(d.size()) != params.dimension)
      throw std::invalid_argument("shape_estimate: direction dimension mismatch");
    if (std::abs(l1(d) - 1.0) > 1e-9)
      throw std::invalid_argument("shape_estimate: directions must be unit for |.|_1");
  }
  // the axis directions are always measured
  for (const auto& d : default_directions(params.dimension)) {
    if (std::count(d.begin(), d.end(), 0.0) != params.dimension - 1) continue;
    if (std::find(directions.begin(), directions.end(), d) == directions.end())
      directions.push_back(d);
  }

  const double growth = auto_growth(params.dimension, lambda, params.constants);
  const double horizon = std::max(t, params.survival.t_surv);
  if (params.window_radius > 0 && static_cast<double>(params.window_radius) < growth * t)
    throw std::invalid_argument("shape_estimate: window radius below growth_constant * t");
  const int radius0 = auto_radius(params, growth, horizon);

  struct Rep {
    bool accepted = false;
    int retries = 0;
    bool capped = false;
    std::vector<double> radii;
    std::vector<Site> region;
  };
  std::vector<Rep> reps(static_cast<size_t>(params.replicas));
  parallel_for(
      params.replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        Rep& r = reps[static_cast<size_t>(i)];
        int radius = radius0;
        for (;;) {
          Trajectory traj = simulate(f, lambda, {Site::origin()}, Window{radius, BoundaryPolicy::flag},
                                     horizon);
          r.accepted = !traj.extinction_time || *traj.extinction_time > params.survival.t_surv;
          if (!r.accepted) return;
          if (traj.boundary_hit) {
            if (r.retries >= params.boundary_retry_cap) {
              r.capped = true;
              return;
            }
            ++r.retries;
            radius *= 2;
            continue;
          }
          r.region = infected_region(traj, t);
          r.radii.resize(directions.size());
          for (size_t j = 0; j < directions.size(); ++j)
            r.radii[j] = directional_radius(r.region, directions[j], params.dimension) / t;
          return;
        }
      },
      params.threads);

  ShapeEstimate out;
  out.lambda = lambda;
  out.t = t;
  out.directions = directions;
  out.replicas = params.replicas;
  long retries = 0, capped = 0;
  std::vector<std::vector<double>> per_dir(directions.size());
  std::unordered_map<Site, long, SiteHash> occ;
  for (const Rep& r : reps) {
    retries += r.retries;
    if (r.capped) {
      ++capped;
      continue;
    }
    if (!r.accepted) continue;
    ++out.accepted;
    for (size_t j = 0; j < directions.size(); ++j) per_dir[j].push_back(r.radii[j]);
    if (occupancy)
      for (const Site& s : r.region) ++occ[s];
  }
  out.radii.assign(directions.size(), kNaN);
  out.radii_stderr.assign(directions.size(), kNaN);
  for (size_t j = 0; j < directions.size(); ++j) {
    if (per_dir[j].empty()) continue;
    auto ms = stats::mean_stderr(per_dir[j]);
    out.radii[j] = ms.mean;
    out.radii_stderr[j] = ms.se;
  }
  if (out.accepted == 0) out.flags.push_back("no_accepted");
  if (retries > 0) out.flags.push_back("boundary_retries:" + std::to_string(retries));
  if (capped > 0) out.flags.push_back("boundary_cap_exceeded:" + std::to_string(capped));
  if (occupancy) {
    OccupancyGrid grid;
    grid.t = t;
    for (const auto& [s, c] : occ)
      grid.frequency.emplace(s, static_cast<double>(c) / static_cast<double>(out.accepted));
    out.occupancy = std::move(grid);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distance, d <= 2, sup norm

namespace {

double sup_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// convex hull, counter-clockwise (monotone chain); degenerate inputs allowed
std::vector<std::vector<double>> hull2(std::vector<std::vector<double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  auto cross = [](const std::vector<double>& o, const std::vector<double>& a,
                  const std::vector<double>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::vector<double>> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool inside_hull2(const std::vector<std::vector<double>>& hull, const std::vector<double>& p) {
  if (hull.size() < 3) return false;
  for (size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    double cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (cr < -1e-12) return false;
  }
  return true;
}

// sup-norm distance from p to segment v..w: the max of two piecewise-linear
// functions of the parameter, minimized over the kink candidates
double point_segment_sup(const std::vector<double>& p, const std::vector<double>& v,
                         const std::vector<double>& w) {
  double ex = w[0] - v[0], ey = w[1] - v[1];
  double ax = p[0] - v[0], ay = p[1] - v[1];
  std::vector<double> cands{0.0, 1.0};
  auto add_root = [&](double num, double den) {
    if (den != 0.0) cands.push_back(num / den);
  };
  add_root(ax, ex);             // x-term zero
  add_root(ay, ey);             // y-term zero
  add_root(ax - ay, ex - ey);   // |x| = |y|, same sign
  add_root(ax + ay, ex + ey);   // |x| = |y|, opposite sign
  double best = std::numeric_limits<double>::infinity();
  for (double s : cands) {
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::max(std::abs(ax - s * ex), std::abs(ay - s * ey)));
  }
  return best;
}

double point_to_hull2(const std::vector<std::vector<double>>& hull, const std::vector<double>& p) {
  if (hull.empty()) throw std::invalid_argument("hausdorff: empty set");
  if (hull.size() == 1) return sup_dist(p, hull[0]);
  if (inside_hull2(hull, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < hull.size(); ++i)
    best = std::min(best, point_segment_sup(p, hull[i], hull[(i + 1) % hull.size()]));
  return best;
}

}  // namespace

double hausdorff_distance_points(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty set");
  const size_t dim = a[0].size();
  if (dim == 1) {
    auto bounds = [](const std::vector<std::vector<double>>& pts) {
      double lo = pts[0][0], hi = pts[0][0];
      for (const auto& p : pts) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
      }
      return std::pair{lo, hi};
    };
    auto [alo, ahi] = bounds(a);
    auto [blo, bhi] = bounds(b);
    return std::max(std::abs(alo - blo), std::abs(ahi - bhi));
  }
  if (dim != 2) throw std::invalid_argument("hausdorff: only d <= 2 supported");
  auto ha = hull2(a), hb = hull2(b);
  double d = 0.0;
  for (const auto& p : ha) d = std::max(d, point_to_hull2(hb, p));
  for (const auto& p : hb) d = std::max(d, point_to_hull2(ha, p));
  return d;
}

double hausdorff_distance(const ShapeEstimate& a, const ShapeEstimate& b) {
  if (a.directions != b.directions) throw std::invalid_argument("hausdorff: direction mismatch");
  auto vertices = [](const ShapeEstimate& s) {
    std::vector<std::vector<double>> pts;
    for (size_t j = 0; j < s.directions.size(); ++j) {
      std::vector<double> p = s.directions[j];
      for (double& c : p) c *= s.radii[j];
      pts.push_back(std::move(p));
    }
    return pts;
  };
  return hausdorff_distance_points(vertices(a), vertices(b));
}

// ---------------------------------------------------------------------------

ScanTable continuity_scan(const std::vector<double>& lambda_grid,
                          const std::vector<Site>& directions, int n, const RunParams& params) {
  if (lambda_grid.empty()) throw std::invalid_argument("continuity_scan: empty grid");
  for (size_t i = 0; i + 1 < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] < lambda_grid[i + 1]))
      throw std::invalid_argument("continuity_scan: grid must be strictly increasing");
  for (double l : lambda_grid) check_rate(l, params);
  if (directions.empty()) throw std::invalid_argument("continuity_scan: no directions");
  if (n < 1) throw std::invalid_argument("continuity_scan: n must be >= 1");
  const size_t nl = lambda_grid.size();
  const size_t nd = directions.size();
  if (nl > detail::kMaxLayers) throw std::invalid_argument("continuity_scan: grid too large");

  std::vector<Site> targets;
  long max_l1 = 0;
  for (const Site& d : directions) {
    targets.push_back(n * d);
    max_l1 = std::max(max_l1, targets.back().l1_norm());
  }
  std::vector<Site> watch = targets;
  std::sort(watch.begin(), watch.end());
  watch.erase(std::unique(watch.begin(), watch.end()), watch.end());

  const double growth = auto_growth(params.dimension, lambda_grid.back(), params.constants);
  const double horizon =
      params.horizon > 0.0
          ? params.horizon
          : std::max(params.survival.t_surv,
                     params.constants.hit_time_budget * static_cast<double>(max_l1));
  const Window window{auto_radius(params, growth, horizon), BoundaryPolicy::flag};
  for (const Site& tsite : targets)
    if (!window.contains(tsite, params.dimension))
      throw std::invalid_argument("continuity_scan: target outside window");
  const double accept_time = std::min(params.survival.t_surv, horizon);

  struct Rep {
    uint64_t accepted = 0;                // per lambda
    std::vector<double> hit;              // [lambda][dir], NaN when missed
  };
  std::vector<Rep> reps(static_cast<size_t>(params.replicas));
  parallel_for(
      params.replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        detail::ReplayConfig cfg;
        cfg.field = &f;
        cfg.window = window;
        cfg.horizon = horizon;
        cfg.lambdas = lambda_grid;
        cfg.initial = {{Site::origin(), nl == 64 ? ~0ull : ((1ull << nl) - 1)}};
        cfg.record_first_hits = false;
        cfg.record_final = false;
        cfg.watch_sites = watch;
        auto layers = detail::replay(cfg);
        Rep& r = reps[static_cast<size_t>(i)];
        r.hit.assign(nl * nd, kNaN);
        for (size_t l = 0; l < nl; ++l) {
          if (accepted_at(layers[l], accept_time)) r.accepted |= 1ull << l;
          for (size_t j = 0; j < nd; ++j) {
            const auto& on = layers[l].watch.at(targets[j]).on_times;
            if (!on.empty()) r.hit[l * nd + j] = on.front();
          }
        }
      },
      params.threads);

  ScanTable table;
  table.directions = directions;
  table.n = n;
  table.diagnostics.max_adjacent_jump.assign(nd, 0.0);
  table.diagnostics.max_adjacent_jump_stderr.assign(nd, 0.0);

  // exact per-seed monotonicity: larger lambda never hits later
  for (const Rep& r : reps)
    for (size_t j = 0; j < nd; ++j)
      for (size_t l = 0; l + 1 < nl; ++l) {
        double a = r.hit[l * nd + j], b = r.hit[(l + 1) * nd + j];
        if (!std::isnan(a) && !std::isnan(b) && b > a) ++table.diagnostics.per_seed_violations;
        if (std::isnan(b) && !std::isnan(a)) ++table.diagnostics.per_seed_violations;
      }

  for (size_t l = 0; l < nl; ++l) {
    ScanRow row;
    row.lambda = lambda_grid[l];
    for (size_t j = 0; j < nd; ++j) {
      std::vector<double> vals;
      long accepted = 0, misses = 0;
      for (const Rep& r : reps) {
        if (!((r.accepted >> l) & 1)) continue;
        ++accepted;
        double h = r.hit[l * nd + j];
        if (std::isnan(h))
          ++misses;
        else
          vals.push_back(h / static_cast<double>(n));
      }
      Estimate e = from_values(vals, params.replicas, accepted, params);
      if (misses > 0) e.flags.push_back("hit_misses:" + std::to_string(misses));
      row.mu.push_back(std::move(e));
    }
    table.rows.push_back(std::move(row));
  }

  for (size_t j = 0; j < nd; ++j) {
    for (size_t l = 0; l + 1 < nl; ++l) {
      const Estimate& a = table.rows[l].mu[j];
      const Estimate& b = table.rows[l + 1].mu[j];
      if (!a.valid() || !b.valid()) continue;
      double jump = std::abs(b.value - a.value);
      double se = std::hypot(a.stderror, b.stderror);
      if (jump > table.diagnostics.max_adjacent_jump[j]) {
        table.diagnostics.max_adjacent_jump[j] = jump;
        table.diagnostics.max_adjacent_jump_stderr[j] = se;
      }
      if (b.value > a.value + 3.0 * se) ++table.diagnostics.ci_violations;
    }
  }
  return table;
}

IdemEstimate idem_probability(const std::vector<ClockKey>& S, double t, double lambda,
                              double lambda_prime, long replicas, const RunParams& params) {
  check_rate(lambda, params);
  check_rate(lambda_prime, params);
  std::vector<char> ok(static_cast<size_t>(replicas), 0);
  parallel_for(
      replicas,
      [&](long i) {
        HarrisField f = replica_field(params, i);
        ok[static_cast<size_t>(i)] = idem_holds(f, S, t, lambda, lambda_prime);
      },
      params.threads);
  long holds = std::count(ok.begin(), ok.end(), 1);
  IdemEstimate out;
  out.p.replicas = replicas;
  out.p.accepted = replicas;
  out.p.ci_level = params.ci_level;
  out.p.value = static_cast<double>(holds) / static_cast<double>(replicas);
  out.p.stderror = stats::binomial_stderr(out.p.value, replicas);
  const double rate = static_cast<double>(S.size()) * t * std::abs(lambda - lambda_prime);
  out.analytic_lower_bound = std::max(0.0, 1.0 - rate);
  out.exact_value = std::exp(-rate);
  return out;
}

// ---------------------------------------------------------------------------
// good growth

namespace {

struct ShapePolytope {
  int dim = 1;
  double lo1 = 0.0, hi1 = 0.0;                 // d = 1 interval bounds
  std::vector<std::vector<double>> hull;       // d = 2

  // is p inside scale * shape?
  bool contains(const std::vector<double>& p, double scale) const {
    if (scale <= 0.0) {
      for (double c : p)
        if (std::abs(c) > 1e-12) return false;
      return true;
    }
    if (dim == 1) return p[0] >= lo1 * scale - 1e-12 && p[0] <= hi1 * scale + 1e-12;
    std::vector<double> q{p[0] / scale, p[1] / scale};
    return inside_hull2(hull, q);
  }
};

ShapePolytope build_polytope(const ShapeEstimate& shape, int dim) {
  ShapePolytope poly;
  poly.dim = dim;
  if (dim == 1) {
    bool have_plus = false, have_minus = false;
    for (size_t j = 0; j < shape.directions.size(); ++j) {
      if (shape.directions[j][0] > 0.0) {
        poly.hi1 = shape.radii[j];
        have_plus = true;
      } else if (shape.directions[j][0] < 0.0) {
        poly.lo1 = -shape.radii[j];
        have_minus = true;
      }
    }
    if (!have_plus || !have_minus)
      throw std::invalid_argument("good_growth: reference shape direction set too coarse");
    return poly;
  }
  if (dim != 2) throw std::invalid_argument("good_growth: only d <= 2 supported");
  std::vector<std::vector<double>> pts;
  int axes = 0;
  for (size_t j = 0; j < shape.directions.size(); ++j) {
    const auto& d = shape.directions[j];
    if (std::count(d.begin(), d.end(), 0.0) == 1 && std::abs(l1(d) - 1.0) < 1e-9) ++axes;
    pts.push_back({d[0] * shape.radii[j], d[1] * shape.radii[j]});
  }
  if (axes < 4) throw std::invalid_argument("good_growth: reference shape direction set too coarse");
  poly.hull = hull2(pts);
  if (poly.hull.size() < 3)
    throw std::invalid_argument("good_growth: degenerate reference shape");
  return poly;
}

}  // namespace

long good_growth_determining_edges(int dim, int L, int N) {
  const long r = static_cast<long>(L) * N - 1;  // open box (-LN, LN)^d
  long per_axis = 2 * r;
  long cross = 1;
  for (int i = 0; i < dim - 1; ++i) cross *= 2 * r + 1;
  return dim * per_axis * cross;
}

Estimate good_growth_probability(double lambda, double lambda0, const ShapeEstimate& reference,
                                 const GoodGrowthParams& gg, long replicas,
                                 const RunParams& params) {
  check_rate(lambda, params);
  check_rate(lambda0, params);
  if (lambda < lambda0) throw std::invalid_argument("good_growth: lambda must be >= lambda0");
  if (!(gg.alpha > 0.0 && gg.alpha < 1.0)) throw std::invalid_argument("good_growth: alpha in (0,1)");
  if (gg.L < 1 || gg.N < 1) throw std::invalid_argument("good_growth: L, N must be positive");
  if (gg.alpha * gg.L < 2.0)
    throw std::invalid_argument("good_growth: alpha*L must be >= 2 to cover the box times");
  if (!(gg.t0_step > 0.0)) throw std::invalid_argument("good_growth: t0_step must be positive");

  const ShapePolytope poly = build_polytope(reference, params.dimension);
  const double aln = gg.alpha * gg.L * gg.N;
  const int dim = params.dimension;

  // start sites of the box [-N,N]^d in odometer order
  std::vector<Site> origins;
  {
    Site s;
    for (int i = 0; i < dim; ++i) s[i] = -gg.N;
    while (true) {
      origins.push_back(s);
      int i = 0;
      while (i < dim && s[i] == gg.N) s[i++] = -gg.N;
      if (i == dim) break;
      ++s[i];
    }
  }
  const Window window{gg.L * gg.N, BoundaryPolicy::flag};

  std::vector<char> holds(static_cast<size_t>(replicas), 0);
  parallel_for(
      replicas,
      [&](long rep) {
        HarrisField f = replica_field(params, rep);
        bool ok = true;
        for (double t0 = 0.0; ok && t0 <= 2.0 * gg.N + 1e-9; t0 += gg.t0_step) {
          const double h = aln - t0;
          HarrisField view = f.shift_time(t0);
          for (size_t base = 0; ok && base < origins.size(); base += detail::kMaxLayers) {
            const size_t count = std::min(origins.size() - base,
                                          static_cast<size_t>(detail::kMaxLayers));
            detail::ReplayConfig cfg;
            cfg.field = &view;
            cfg.window = window;
            cfg.horizon = h;
            cfg.lambdas = {lambda};
            cfg.shared_rate = true;
            cfg.layer_count = static_cast<int>(count);
            for (size_t j = 0; j < count; ++j)
              cfg.initial.emplace_back(origins[base + j], 1ull << j);
            cfg.record_first_hits = false;
            auto layers = detail::replay(cfg);
            for (size_t j = 0; j < count && ok; ++j) {
              // confinement in the open box: reaching the window boundary
              // (sup-norm LN) is exactly the violation
              if (layers[j].boundary_hit) {
                ok = false;
                break;
              }
              const Site& x0 = origins[base + j];
              const double scale = (1.0 + gg.epsilon) * h;
              for (const Site& y : layers[j].final_sites) {
                std::vector<double> p(static_cast<size_t>(dim));
                for (int i = 0; i < dim; ++i) p[static_cast<size_t>(i)] = y[i] - x0[i];
                if (!poly.contains(p, scale)) {
                  ok = false;
                  break;
                }
              }
            }
          }
        }
        holds[static_cast<size_t>(rep)] = ok;
      },
      params.threads);

  long count = std::count(holds.begin(), holds.end(), 1);
  Estimate e;
  e.replicas = replicas;
  e.accepted = replicas;
  e.ci_level = params.ci_level;
  e.value = static_cast<double>(count) / static_cast<double>(replicas);
  e.stderror = stats::binomial_stderr(e.value, replicas);
  return e;
}

}  // namespace contact
