#pragma once

#include <optional>
#include <vector>

#include "contact/simulate.hpp"

namespace contact {

enum class HitStatus : uint8_t {
  regenerated,        // some progeny of (x, u_k) passed the survival proxy
  initial_died,       // the base run went extinct before x was re-infected
  horizon_exhausted,  // the recursion needed times beyond the base horizon
  step_capped,        // policy.max_steps reached
};

const char* to_string(HitStatus s);

// The u_n / v_n regeneration data for one (x, lambda) query.
// u holds u_0..u_K and v holds v_0..v_{K-1}; v_K is conceptually infinite.
struct HittingRecord {
  Site x{};
  double lambda = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  int K = 0;
  std::optional<double> sigma;  // u_K, set when regenerated
  HitStatus status = HitStatus::horizon_exhausted;
};

// Runs the base process from the origin and alternates re-infection searches
// with progeny survival checks until a progeny survives the proxy.
HittingRecord essential_hitting(const HarrisField& field, double lambda, const Site& x,
                                const Window& window, double horizon,
                                const SurvivalPolicy& policy, double growth_constant = 0.0);

// Same recursion against an existing base trajectory (must watch x and start
// from the origin); used to amortize one base run over several targets.
HittingRecord essential_hitting_with_base(const Trajectory& base, const HarrisField& field,
                                          const Site& x, const SurvivalPolicy& policy,
                                          double growth_constant = 0.0);

// The regeneration shift: space shift by x composed with time shift by sigma.
HarrisField regeneration_view(const HarrisField& field, const HittingRecord& record);

struct GEventResult {
  bool g_holds = false;
  std::optional<bool> sigma_equal;  // set when g_holds and the base run survives
  // conjuncts and intermediates, for diagnostics
  bool a_m = false;
  bool b_l = false;
  bool idem = false;
  bool base_survives = false;
  std::optional<double> sigma_lambda;
  std::optional<double> sigma_lambda_prime;
};

// Checks the three-part good event at (lambda, lambda_prime): the sigma-
// determining box A_M, the shifted progeny-confinement event B_L at
// lambda_prime, and mark agreement on the enclosing space-time box. On
// realizations where the event holds and the base run survives, the essential
// hitting times at the two rates must coincide exactly.
GEventResult g_event_check(const HarrisField& field, double lambda, double lambda_prime,
                           const Site& x, double M, double L, const SurvivalPolicy& policy,
                           double growth_constant = 0.0);

}  // namespace contact
