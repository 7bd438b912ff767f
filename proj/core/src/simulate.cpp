#include "contact/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "engine.hpp"

namespace contact {

namespace {

Trajectory layer_to_trajectory(detail::LayerResult&& r, double lambda, const HarrisField& field,
                               const std::vector<Site>& initial, const Window& window,
                               double horizon) {
  Trajectory t;
  t.lambda = lambda;
  t.dimension = field.dimension();
  t.initial = initial;
  t.window = window;
  t.horizon = horizon;
  t.events = std::move(r.events);
  t.first_hit = std::move(r.first_hit);
  t.final_config = std::move(r.final_sites);
  t.extinction_time = r.extinction_time;
  t.boundary_hit = r.boundary_hit;
  t.watch = std::move(r.watch);
  return t;
}

}  // namespace

std::map<double, Trajectory> simulate_coupled(const HarrisField& field,
                                              const std::vector<double>& lambdas,
                                              const std::vector<Site>& initial,
                                              const Window& window, double horizon,
                                              const SimulateOptions& opts) {
  if (lambdas.empty()) throw std::invalid_argument("simulate_coupled: no rates");
  std::vector<double> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  detail::ReplayConfig cfg;
  cfg.field = &field;
  cfg.window = window;
  cfg.horizon = horizon;
  cfg.lambdas = sorted;
  cfg.record_events = opts.record_events;
  cfg.watch_sites = opts.watch_sites;
  const uint64_t full = sorted.size() == 64 ? ~0ull : ((1ull << sorted.size()) - 1);
  cfg.initial.reserve(initial.size());
  for (const Site& s : initial) cfg.initial.emplace_back(s, full);

  std::vector<detail::LayerResult> layers = detail::replay(cfg);
  std::map<double, Trajectory> out;
  for (size_t l = 0; l < sorted.size(); ++l)
    out.emplace(sorted[l], layer_to_trajectory(std::move(layers[l]), sorted[l], field, initial,
                                               window, horizon));
  return out;
}

Trajectory simulate(const HarrisField& field, double lambda, const std::vector<Site>& initial,
                    const Window& window, double horizon, const SimulateOptions& opts) {
  auto m = simulate_coupled(field, {lambda}, initial, window, horizon, opts);
  return std::move(m.begin()->second);
}

std::optional<double> hitting_time(const Trajectory& traj, const Site& x) {
  if (!traj.window.contains(x, traj.dimension))
    throw std::invalid_argument("hitting_time: site outside window");
  auto it = traj.first_hit.find(x);
  if (it == traj.first_hit.end()) return std::nullopt;
  return it->second;
}

std::vector<Site> infected_region(const Trajectory& traj, double t) {
  if (t < 0.0 || t > traj.horizon) throw std::invalid_argument("infected_region: t out of range");
  std::vector<Site> out;
  for (const auto& [s, ht] : traj.first_hit)
    if (ht <= t) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

Lifetime lifetime(const Trajectory& traj) {
  if (traj.extinction_time) return {true, *traj.extinction_time};
  return {false, 0.0};
}

double default_growth_constant(int dimension, double lambda) {
  static constexpr double kMultiplier[kMaxDim] = {2.0, 3.0, 4.5, 5.5};
  return kMultiplier[static_cast<size_t>(dimension - 1)] * lambda;
}

int proxy_window_radius(int dimension, double lambda, const SurvivalPolicy& policy,
                        double growth_constant) {
  double g = growth_constant > 0.0 ? growth_constant : default_growth_constant(dimension, lambda);
  return static_cast<int>(std::ceil(g * policy.window_factor * policy.t_surv)) + 2;
}

SurvivalOutcome survival_proxy(const HarrisField& field, double lambda, const Site& x, double t0,
                               const SurvivalPolicy& policy, double growth_constant) {
  HarrisField view = field.shift_time(t0).shift_space(x);
  Window w{proxy_window_radius(field.dimension(), lambda, policy, growth_constant),
           BoundaryPolicy::flag};
  Trajectory traj = simulate(view, lambda, {Site::origin()}, w, policy.t_surv);
  if (traj.extinction_time) return {false, t0 + *traj.extinction_time};
  return {true, 0.0};
}

}  // namespace contact
