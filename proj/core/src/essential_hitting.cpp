#include "contact/essential_hitting.hpp"

#include <cmath>
#include <stdexcept>

namespace contact {

const char* to_string(HitStatus s) {
  switch (s) {
    case HitStatus::regenerated: return "regenerated";
    case HitStatus::initial_died: return "initial_died";
    case HitStatus::horizon_exhausted: return "horizon_exhausted";
    case HitStatus::step_capped: return "step_capped";
  }
  return "?";
}

HittingRecord essential_hitting_with_base(const Trajectory& base, const HarrisField& field,
                                          const Site& x, const SurvivalPolicy& policy,
                                          double growth_constant) {
  auto wit = base.watch.find(x);
  if (wit == base.watch.end())
    throw std::invalid_argument("essential_hitting: base trajectory does not watch x");
  const WatchHistory& hist = wit->second;

  HittingRecord rec;
  rec.x = x;
  rec.lambda = base.lambda;
  rec.u.push_back(0.0);  // u_0
  rec.v.push_back(0.0);  // v_0

  double v_k = 0.0;
  for (int k = 0;; ++k) {
    if (k >= policy.max_steps) {
      rec.status = HitStatus::step_capped;
      break;
    }
    // u_{k+1}: first time >= v_k at which x is infected in the base run
    std::optional<double> u_next;
    if (v_k <= base.horizon) u_next = hist.infected_at_or_after(v_k);
    if (base.extinction_time && u_next && *u_next >= *base.extinction_time) u_next.reset();
    if (!u_next) {
      rec.status = base.extinction_time ? HitStatus::initial_died : HitStatus::horizon_exhausted;
      break;
    }
    rec.u.push_back(*u_next);
    // v_{k+1} = u_{k+1} + lifetime of the progeny of (x, u_{k+1})
    SurvivalOutcome out = survival_proxy(field, base.lambda, x, *u_next, policy, growth_constant);
    if (out.survives) {
      rec.status = HitStatus::regenerated;
      rec.K = k + 1;
      rec.sigma = *u_next;
      break;
    }
    rec.v.push_back(out.extinction_time);
    v_k = out.extinction_time;
    if (v_k > base.horizon && !base.extinction_time) {
      rec.status = HitStatus::horizon_exhausted;
      break;
    }
  }
  return rec;
}

HittingRecord essential_hitting(const HarrisField& field, double lambda, const Site& x,
                                const Window& window, double horizon,
                                const SurvivalPolicy& policy, double growth_constant) {
  if (!window.contains(x, field.dimension()))
    throw std::invalid_argument("essential_hitting: x outside window");
  SimulateOptions opts;
  opts.watch_sites = {x};
  Trajectory base = simulate(field, lambda, {Site::origin()}, window, horizon, opts);
  return essential_hitting_with_base(base, field, x, policy, growth_constant);
}

HarrisField regeneration_view(const HarrisField& field, const HittingRecord& record) {
  if (record.status != HitStatus::regenerated)
    throw std::invalid_argument("regeneration_view: record not regenerated");
  return field.shift_time(*record.sigma).shift_space(record.x);
}

GEventResult g_event_check(const HarrisField& field, double lambda, double lambda_prime,
                           const Site& x, double M, double L, const SurvivalPolicy& policy,
                           double growth_constant) {
  if (lambda_prime > lambda) throw std::invalid_argument("g_event_check: lambda_prime > lambda");
  if (lambda > field.lambda_max()) throw std::invalid_argument("g_event_check: lambda > lambda_max");
  const int dim = field.dimension();
  const double growth =
      growth_constant > 0.0 ? growth_constant : default_growth_constant(dim, lambda);

  GEventResult res;

  // Base window large enough to dominate every progeny window the recursion
  // opens, so progeny runs are exact restrictions of the base run.
  Window base_window{proxy_window_radius(dim, lambda, policy, growth_constant) + x.sup_norm() + 2,
                     BoundaryPolicy::flag};
  const double base_horizon = std::max(policy.t_surv, 4.0 * M);

  HittingRecord rec =
      essential_hitting(field, lambda, x, base_window, base_horizon, policy, growth_constant);
  res.base_survives = survival_proxy(field, lambda, Site::origin(), 0.0, policy, growth_constant)
                          .survives;

  // A_M: sigma_lambda <= M and the region infected before sigma_lambda stays
  // in the M-box.
  if (rec.status == HitStatus::regenerated) {
    res.sigma_lambda = rec.sigma;
    if (*rec.sigma <= M) {
      SimulateOptions opts;
      Trajectory base = simulate(field, lambda, {Site::origin()}, base_window, *rec.sigma, opts);
      res.a_m = true;
      for (const auto& [s, ht] : base.first_hit) {
        (void)ht;
        if (s.sup_norm() > static_cast<int32_t>(M)) {
          res.a_m = false;
          break;
        }
      }
    }
  }

  // B_L at lambda_prime on the regeneration view: progeny confined to the
  // C*L box up to L, and not "alive at L but doomed" (survival proxy).
  if (rec.status == HitStatus::regenerated) {
    HarrisField view = regeneration_view(field, rec);
    const int cl = static_cast<int>(std::ceil(growth * L));
    Window prog_window{cl + 2, BoundaryPolicy::flag};
    Trajectory prog = simulate(view, lambda_prime, {Site::origin()}, prog_window, L);
    bool confined = true;
    for (const auto& [s, ht] : prog.first_hit) {
      (void)ht;
      if (s.sup_norm() > cl) {
        confined = false;
        break;
      }
    }
    bool alive_at_L = !prog.extinction_time.has_value();
    bool not_doomed =
        !alive_at_L ||
        survival_proxy(view, lambda_prime, Site::origin(), 0.0, policy, growth_constant).survives;
    res.b_l = confined && not_doomed;
  }

  // Mark agreement over the enclosing box, lemma-style: sites in
  // [-(M+CL), M+CL]^d, horizon M+L.
  const int s_radius = static_cast<int>(std::ceil(M + growth * L));
  std::vector<ClockKey> S = box_edges(dim, s_radius);
  res.idem = idem_holds(field, S, M + L, lambda_prime, lambda);

  res.g_holds = res.a_m && res.b_l && res.idem;

  if (res.g_holds && res.base_survives) {
    HittingRecord rec_prime = essential_hitting(field, lambda_prime, x, base_window, base_horizon,
                                                policy, growth_constant);
    if (rec_prime.status == HitStatus::regenerated) res.sigma_lambda_prime = rec_prime.sigma;
    res.sigma_equal = rec_prime.status == HitStatus::regenerated && rec.sigma == rec_prime.sigma;
  }
  return res;
}

}  // namespace contact
