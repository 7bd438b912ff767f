#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "contact/random_field.hpp"

namespace contact {

enum class EventKind : uint8_t { recovery, infection };

struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::recovery;
  Site site{};    // the site whose state changed
  Site source{};  // infections: the already-infected endpoint
};

// Full on/off history of one watched site: on_times[i] <= off_times[i] bound
// the i-th infected interval [on, off); a trailing on without off means the
// site is infected at the horizon.
struct WatchHistory {
  std::vector<double> on_times;
  std::vector<double> off_times;

  // First time >= q at which the site is infected, if any is recorded.
  std::optional<double> infected_at_or_after(double q) const {
    for (size_t i = 0; i < on_times.size(); ++i) {
      double off = i < off_times.size() ? off_times[i] : std::numeric_limits<double>::infinity();
      if (q < on_times[i]) return on_times[i];
      if (q < off) return q;
    }
    return std::nullopt;
  }
};

struct SimulateOptions {
  bool record_events = false;
  std::vector<Site> watch_sites{};
};

// One simulated run of the graphical construction on a finite window.
struct Trajectory {
  double lambda = 0.0;
  int dimension = 1;
  std::vector<Site> initial;
  Window window{};
  double horizon = 0.0;

  std::vector<EventRecord> events;  // applied events, only when requested
  std::unordered_map<Site, double, SiteHash> first_hit;
  std::vector<Site> final_config;  // sorted
  std::optional<double> extinction_time;
  bool boundary_hit = false;
  std::unordered_map<Site, WatchHistory, SiteHash> watch;
};

Trajectory simulate(const HarrisField& field, double lambda, const std::vector<Site>& initial,
                    const Window& window, double horizon, const SimulateOptions& opts = {});

// One shared clock replay for every rate; for lambda' <= lambda the
// configurations are nested at all times, exactly.
std::map<double, Trajectory> simulate_coupled(const HarrisField& field,
                                              const std::vector<double>& lambdas,
                                              const std::vector<Site>& initial,
                                              const Window& window, double horizon,
                                              const SimulateOptions& opts = {});

// First infection time of x, if x was ever infected.
std::optional<double> hitting_time(const Trajectory& traj, const Site& x);

// H_t: the sites first infected at or before t, sorted.
std::vector<Site> infected_region(const Trajectory& traj, double t);

struct Lifetime {
  bool extinct = false;
  double time = 0.0;  // valid when extinct
};
Lifetime lifetime(const Trajectory& traj);

// Finite-horizon stand-in for {tau = +infinity}: the progeny of (x, t0) is
// still alive at t0 + t_surv.
struct SurvivalPolicy {
  double t_surv = 150.0;
  double window_factor = 1.0;
  int max_steps = 100;
};

struct SurvivalOutcome {
  bool survives = false;
  double extinction_time = 0.0;  // absolute time t0 + s, valid when !survives
};

// Per-axis growth-rate bound used to size windows when no constant is
// configured. Higher dimensions have more infection routes, so the front
// outruns the d=1 rate: the multiplier follows the inverse first-passage
// time constants of the exponential lattice.
double default_growth_constant(int dimension, double lambda);

// Progeny window radius used by the proxy; growth_constant == 0 means the
// dimension-aware default.
int proxy_window_radius(int dimension, double lambda, const SurvivalPolicy& policy,
                        double growth_constant = 0.0);

SurvivalOutcome survival_proxy(const HarrisField& field, double lambda, const Site& x, double t0,
                               const SurvivalPolicy& policy, double growth_constant = 0.0);

}  // namespace contact
