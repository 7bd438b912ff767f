#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "contact/essential_hitting.hpp"
#include "contact/prf.hpp"
#include "contact/stats.hpp"

using namespace contact;

namespace {
const SurvivalPolicy kPolicy{60.0, 1.0, 100};
const Window kWindow{300, BoundaryPolicy::flag};
const double kHorizon = 120.0;
}  // namespace

TEST_CASE("origin query regenerates immediately on surviving runs") {
  int checked = 0;
  for (int i = 0; i < 40 && checked < 15; ++i) {
    HarrisField f(prf::derive_seed(1000, static_cast<uint64_t>(i)), 1, 3.0);
    if (!survival_proxy(f, 2.0, Site::origin(), 0.0, kPolicy).survives) continue;
    HittingRecord rec = essential_hitting(f, 2.0, Site::origin(), kWindow, kHorizon, kPolicy);
    REQUIRE(rec.status == HitStatus::regenerated);
    CHECK(rec.K == 1);
    CHECK(rec.u == std::vector<double>{0.0, 0.0});
    CHECK(rec.sigma == 0.0);
    ++checked;
  }
  CHECK(checked >= 15);
}

TEST_CASE("u_1 is the hitting time and the u/v ladder interlaces") {
  const Site x{3};
  int regenerated = 0;
  for (int i = 0; i < 120; ++i) {
    HarrisField f(prf::derive_seed(1100, static_cast<uint64_t>(i)), 1, 3.0);
    SimulateOptions opts;
    opts.watch_sites = {x};
    Trajectory base = simulate(f, 2.0, {Site::origin()}, kWindow, kHorizon, opts);
    HittingRecord rec = essential_hitting_with_base(base, f, x, kPolicy);

    REQUIRE(rec.u.size() >= 1);
    CHECK(rec.u[0] == 0.0);
    CHECK(rec.v[0] == 0.0);
    if (rec.u.size() >= 2) {
      auto hit = hitting_time(base, x);
      REQUIRE(hit.has_value());
      CHECK(rec.u[1] == *hit);
    }
    for (size_t k = 0; k < rec.v.size(); ++k) {
      CHECK(rec.u[k] <= rec.v[k]);
      if (k + 1 < rec.u.size()) CHECK(rec.v[k] <= rec.u[k + 1]);
    }
    if (rec.status == HitStatus::regenerated) {
      ++regenerated;
      REQUIRE(rec.sigma.has_value());
      CHECK(rec.K == static_cast<int>(rec.u.size()) - 1);
      CHECK(*rec.sigma == rec.u.back());
      CHECK(static_cast<int>(rec.v.size()) == rec.K);
      CHECK(*rec.sigma >= rec.u[1]);
    }
  }
  CHECK(regenerated > 40);
}

TEST_CASE("statuses: initial_died on dying runs, caps and horizons reported") {
  int died = 0, reg = 0;
  for (int i = 0; i < 80; ++i) {
    HarrisField f(prf::derive_seed(1200, static_cast<uint64_t>(i)), 1, 3.0);
    HittingRecord rec = essential_hitting(f, 1.0, Site{4}, Window{120, BoundaryPolicy::flag},
                                          100.0, SurvivalPolicy{30.0, 1.0, 100});
    died += rec.status == HitStatus::initial_died;
    reg += rec.status == HitStatus::regenerated;
    if (rec.status == HitStatus::initial_died) CHECK(!rec.sigma.has_value());
  }
  CHECK(died > 30);  // lambda=1 is subcritical in d=1

  // horizon too small to even search: horizon_exhausted, never a crash
  {
    HarrisField f(prf::derive_seed(1201, 1), 1, 3.0);
    HittingRecord rec = essential_hitting(f, 2.0, Site{40}, Window{60, BoundaryPolicy::flag}, 0.5,
                                          SurvivalPolicy{40.0, 1.0, 100});
    CHECK((rec.status == HitStatus::horizon_exhausted || rec.status == HitStatus::initial_died));
  }
  // max_steps = 0 forces the cap
  {
    HarrisField f(prf::derive_seed(1202, 1), 1, 3.0);
    HittingRecord rec = essential_hitting(f, 2.0, Site{1}, kWindow, kHorizon,
                                          SurvivalPolicy{60.0, 1.0, 0});
    CHECK(rec.status == HitStatus::step_capped);
  }
}

TEST_CASE("regeneration_view composes shifts") {
  HarrisField f(77, 1, 3.0);
  HittingRecord rec;
  rec.status = HitStatus::regenerated;
  rec.x = Site{5};
  rec.sigma = 4.25;
  HarrisField view = regeneration_view(f, rec);
  CHECK(view.time_offset() == 4.25);
  CHECK(view.space_offset() == Site{5});

  HittingRecord rec2;
  rec2.status = HitStatus::regenerated;
  rec2.x = Site{-2};
  rec2.sigma = 1.5;
  HarrisField twice = regeneration_view(view, rec2);
  HarrisField direct = f.shift_time(5.75).shift_space(Site{3});
  ClockKey e = ClockKey::edge_clock(Site{1}, 0);
  CHECK(twice.arrivals(e, 4.0).times == direct.arrivals(e, 4.0).times);

  HittingRecord bad;
  bad.status = HitStatus::initial_died;
  CHECK_THROWS_AS((void)regeneration_view(f, bad), std::invalid_argument);
}

TEST_CASE("identity view for the origin record") {
  HarrisField f(78, 1, 3.0);
  HittingRecord rec;
  rec.status = HitStatus::regenerated;
  rec.x = Site::origin();
  rec.sigma = 0.0;
  HarrisField view = regeneration_view(f, rec);
  ClockKey e = ClockKey::edge_clock(Site{0}, 0);
  CHECK(view.arrivals(e, 5.0).times == f.arrivals(e, 5.0).times);
}

TEST_CASE("mean sigma grows affinely in the distance") {
  // collect regenerated records for x = k e1 and check a linear trend
  std::vector<double> mean_sigma;
  std::vector<double> ks{1, 2, 3, 4, 5};
  for (double kd : ks) {
    int k = static_cast<int>(kd);
    std::vector<double> sigmas;
    for (int i = 0; sigmas.size() < 120 && i < 600; ++i) {
      HarrisField f(prf::derive_seed(1300 + static_cast<uint64_t>(k), static_cast<uint64_t>(i)), 1,
                    3.0);
      HittingRecord rec = essential_hitting(f, 2.0, Site{k}, kWindow, kHorizon, kPolicy);
      if (rec.status == HitStatus::regenerated) sigmas.push_back(*rec.sigma);
    }
    REQUIRE(sigmas.size() >= 120);
    mean_sigma.push_back(stats::mean_stderr(sigmas).mean);
  }
  // least squares fit mean_sigma ~ a + b k; demand a strong linear fit
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    sx += ks[i];
    sy += mean_sigma[i];
    sxx += ks[i] * ks[i];
    sxy += ks[i] * mean_sigma[i];
  }
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = (sy - b * sx) / n;
  CHECK(b > 0.0);
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < ks.size(); ++i) {
    ss_res += std::pow(mean_sigma[i] - (a + b * ks[i]), 2);
    ss_tot += std::pow(mean_sigma[i] - sy / n, 2);
  }
  CHECK(1.0 - ss_res / ss_tot > 0.9);
}

TEST_CASE("g_event at lambda' = lambda reduces to A_M and B_L") {
  int holds = 0, qualifying = 0;
  for (int i = 0; i < 25; ++i) {
    HarrisField f(prf::derive_seed(1400, static_cast<uint64_t>(i)), 1, 3.0);
    GEventResult g = g_event_check(f, 2.0, 2.0, Site{1}, 10.0, 10.0, SurvivalPolicy{40.0, 1.0, 100},
                                   4.0);
    CHECK(g.idem);
    CHECK(g.g_holds == (g.a_m && g.b_l));
    holds += g.g_holds;
    if (g.g_holds && g.base_survives) {
      ++qualifying;
      REQUIRE(g.sigma_equal.has_value());
      CHECK(*g.sigma_equal);
    }
  }
  CHECK(holds > 0);
  CHECK(qualifying > 0);
}

TEST_CASE("g_event probability rises as lambda' approaches lambda") {
  // moderate-scale version of the trend check
  const double lambda = 2.0;
  std::vector<double> primes{1.7, 1.85, 1.95};
  std::vector<int> holds(primes.size(), 0);
  const int n = 30;
  for (int i = 0; i < n; ++i) {
    HarrisField f(prf::derive_seed(1500, static_cast<uint64_t>(i)), 1, 3.0);
    for (size_t j = 0; j < primes.size(); ++j) {
      GEventResult g = g_event_check(f, lambda, primes[j], Site{1}, 12.0, 8.0,
                                     SurvivalPolicy{30.0, 1.0, 100}, 4.0);
      holds[j] += g.g_holds;
    }
  }
  CHECK(holds[0] <= holds[2] + 3);  // wide tolerance at this scale
}
