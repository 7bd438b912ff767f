#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "contact/oracle.hpp"
#include "contact/prf.hpp"
#include "contact/simulate.hpp"
#include "contact/stats.hpp"
#include "reference_sim.hpp"

using namespace contact;

namespace {
std::vector<Site> random_initial(uint64_t key, int dim, int radius, int max_count) {
  std::vector<Site> out;
  int count = 1 + static_cast<int>(prf::at(key, 0) % static_cast<uint64_t>(max_count));
  for (int i = 0; i < count; ++i) {
    Site s;
    for (int d = 0; d < dim; ++d)
      s[d] = static_cast<int32_t>(prf::at(key, 10 + static_cast<uint64_t>(i) * 4 + static_cast<uint64_t>(d)) %
                                  (2 * static_cast<uint64_t>(radius) + 1)) - radius;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}
}  // namespace

TEST_CASE("horizon zero leaves the initial configuration untouched") {
  HarrisField f(3, 1, 3.0);
  SimulateOptions opts;
  opts.record_events = true;
  Trajectory t = simulate(f, 2.0, {Site{1}, Site{-2}}, Window{5, BoundaryPolicy::flag}, 0.0, opts);
  CHECK(t.events.empty());
  CHECK(t.final_config == std::vector<Site>{Site{-2}, Site{1}});
  CHECK(t.first_hit.at(Site{1}) == 0.0);
  CHECK(!t.extinction_time);
}

TEST_CASE("empty initial set is extinct at time zero") {
  HarrisField f(3, 1, 3.0);
  Trajectory t = simulate(f, 2.0, {}, Window{5, BoundaryPolicy::flag}, 4.0);
  REQUIRE(t.extinction_time.has_value());
  CHECK(*t.extinction_time == 0.0);
  Lifetime lt = lifetime(t);
  CHECK(lt.extinct);
  CHECK(lt.time == 0.0);
}

TEST_CASE("isolated site dies at its first recovery arrival, mean one") {
  // replay determinism on a fixed seed
  {
    HarrisField f(11, 1, 3.0);
    double first = f.arrivals(ClockKey::site_clock(Site{0}), 50.0).times.front();
    Trajectory t = simulate(f, 2.0, {Site::origin()}, Window{0, BoundaryPolicy::flag}, 50.0);
    REQUIRE(t.extinction_time.has_value());
    CHECK(*t.extinction_time == first);
  }
  // Exp(1) lifetime over seeds
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    HarrisField f(prf::derive_seed(90, static_cast<uint64_t>(i)), 1, 3.0);
    Trajectory t = simulate(f, 2.0, {Site::origin()}, Window{0, BoundaryPolicy::flag}, 60.0);
    REQUIRE(t.extinction_time.has_value());
    sum += *t.extinction_time;
  }
  CHECK(std::abs(sum / n - 1.0) < 3.0 / 100.0);
}

TEST_CASE("engine matches the brute-force reference replay exactly") {
  for (int dim : {1, 2}) {
    for (int i = 0; i < (dim == 1 ? 120 : 40); ++i) {
      uint64_t seed = prf::derive_seed(100 + static_cast<uint64_t>(dim), static_cast<uint64_t>(i));
      HarrisField f(seed, dim, 3.0);
      Window w{dim == 1 ? 8 : 4, BoundaryPolicy::flag};
      std::vector<Site> init = random_initial(seed, dim, w.radius, 3);
      double lambda = 1.0 + static_cast<double>(prf::at(seed, 99) % 2000) / 1000.0;
      Trajectory a = simulate(f, lambda, init, w, 6.0);
      Trajectory b = testing::reference_simulate(f, lambda, init, w, 6.0);
      REQUIRE(a.final_config == b.final_config);
      REQUIRE(a.first_hit.size() == b.first_hit.size());
      for (const auto& [s, t] : b.first_hit) REQUIRE(a.first_hit.at(s) == t);
      CHECK(a.extinction_time == b.extinction_time);
      CHECK(a.boundary_hit == b.boundary_hit);
    }
  }
}

TEST_CASE("monotonicity in the initial set, exact at every event time") {
  for (int i = 0; i < 60; ++i) {
    uint64_t seed = prf::derive_seed(200, static_cast<uint64_t>(i));
    HarrisField f(seed, 1, 3.0);
    Window w{10, BoundaryPolicy::flag};
    std::vector<Site> a = random_initial(seed, 1, 5, 3);
    std::vector<Site> b = a;
    b.push_back(Site{6});
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    SimulateOptions opts;
    opts.record_events = true;
    Trajectory ta = simulate(f, 2.0, a, w, 5.0, opts);
    Trajectory tb = simulate(f, 2.0, b, w, 5.0, opts);
    // replay both event logs side by side, checking containment after each step
    std::set<Site> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    size_t ia = 0, ib = 0;
    auto step = [](std::set<Site>& s, const EventRecord& e) {
      if (e.kind == EventKind::recovery) s.erase(e.site);
      else s.insert(e.site);
    };
    while (ia < ta.events.size() || ib < tb.events.size()) {
      double na = ia < ta.events.size() ? ta.events[ia].time : 1e300;
      double nb = ib < tb.events.size() ? tb.events[ib].time : 1e300;
      if (na <= nb) step(sa, ta.events[ia++]);
      else step(sb, tb.events[ib++]);
      if (na == nb) continue;  // settle simultaneous pair before checking
      for (const Site& s : sa) REQUIRE(sb.count(s) == 1);
    }
    for (const Site& s : sa) REQUIRE(sb.count(s) == 1);
    // hitting times can only get earlier with a larger start set
    for (const auto& [s, t] : ta.first_hit) {
      auto it = tb.first_hit.find(s);
      REQUIRE(it != tb.first_hit.end());
      REQUIRE(it->second <= t);
    }
  }
}

TEST_CASE("additivity: a set start equals the union of singleton starts") {
  for (int dim : {1, 2}) {
    for (int i = 0; i < (dim == 1 ? 60 : 25); ++i) {
      uint64_t seed = prf::derive_seed(300 + static_cast<uint64_t>(dim), static_cast<uint64_t>(i));
      HarrisField f(seed, dim, 3.0);
      Window w{dim == 1 ? 8 : 4, BoundaryPolicy::flag};
      std::vector<Site> init = random_initial(seed, dim, w.radius, 4);
      Trajectory whole = simulate(f, 2.2, init, w, 5.0);
      std::unordered_map<Site, double, SiteHash> best;
      std::set<Site> final_union;
      for (const Site& x : init) {
        Trajectory one = simulate(f, 2.2, {x}, w, 5.0);
        for (const auto& [s, t] : one.first_hit) {
          auto it = best.find(s);
          if (it == best.end() || t < it->second) best[s] = t;
        }
        for (const Site& s : one.final_config) final_union.insert(s);
      }
      REQUIRE(best.size() == whole.first_hit.size());
      for (const auto& [s, t] : whole.first_hit) REQUIRE(best.at(s) == t);
      REQUIRE(std::vector<Site>(final_union.begin(), final_union.end()) == whole.final_config);
    }
  }
}

TEST_CASE("simulate_coupled equals solo runs and preserves containment") {
  const std::vector<double> grid{1.8, 2.2, 2.6};
  for (int i = 0; i < 40; ++i) {
    uint64_t seed = prf::derive_seed(400, static_cast<uint64_t>(i));
    HarrisField f(seed, 1, 3.0);
    Window w{12, BoundaryPolicy::flag};
    auto coupled = simulate_coupled(f, grid, {Site::origin()}, w, 8.0);
    REQUIRE(coupled.size() == grid.size());
    for (double l : grid) {
      Trajectory solo = simulate(f, l, {Site::origin()}, w, 8.0);
      const Trajectory& c = coupled.at(l);
      REQUIRE(c.final_config == solo.final_config);
      REQUIRE(c.first_hit.size() == solo.first_hit.size());
      for (const auto& [s, t] : solo.first_hit) REQUIRE(c.first_hit.at(s) == t);
      CHECK(c.extinction_time == solo.extinction_time);
      CHECK(c.boundary_hit == solo.boundary_hit);
    }
    // first_hit under the smaller rate never beats the larger rate
    for (size_t a = 0; a + 1 < grid.size(); ++a) {
      const Trajectory& lo = coupled.at(grid[a]);
      const Trajectory& hi = coupled.at(grid[a + 1]);
      for (const auto& [s, t] : lo.first_hit) {
        auto it = hi.first_hit.find(s);
        REQUIRE(it != hi.first_hit.end());
        REQUIRE(it->second <= t);
      }
    }
  }
  // single-rate coupled call collapses to simulate
  HarrisField f(17, 1, 3.0);
  auto one = simulate_coupled(f, {2.0}, {Site::origin()}, Window{5, BoundaryPolicy::flag}, 4.0);
  Trajectory solo = simulate(f, 2.0, {Site::origin()}, Window{5, BoundaryPolicy::flag}, 4.0);
  CHECK(one.at(2.0).final_config == solo.final_config);
}

TEST_CASE("coupled containment holds on a large window too") {
  const std::vector<double> grid{1.8, 2.2, 2.6};
  for (int i = 0; i < 25; ++i) {
    HarrisField f(prf::derive_seed(450, static_cast<uint64_t>(i)), 1, 3.0);
    Window w{50, BoundaryPolicy::flag};
    auto coupled = simulate_coupled(f, grid, {Site::origin()}, w, 20.0);
    for (size_t a = 0; a + 1 < grid.size(); ++a) {
      const Trajectory& lo = coupled.at(grid[a]);
      const Trajectory& hi = coupled.at(grid[a + 1]);
      for (const auto& [s, t] : lo.first_hit) {
        auto it = hi.first_hit.find(s);
        REQUIRE(it != hi.first_hit.end());
        REQUIRE(it->second <= t);
      }
      for (const Site& s : lo.final_config)
        REQUIRE(std::binary_search(hi.final_config.begin(), hi.final_config.end(), s));
      if (lo.extinction_time && hi.extinction_time)
        REQUIRE(*hi.extinction_time >= *lo.extinction_time);
    }
  }
}

TEST_CASE("hitting_time is absent for sites an extinct run never reached") {
  int checked = 0;
  for (int i = 0; i < 40 && checked < 10; ++i) {
    HarrisField f(prf::derive_seed(460, static_cast<uint64_t>(i)), 1, 3.0);
    Window w{30, BoundaryPolicy::flag};
    Trajectory t = simulate(f, 0.6, {Site::origin()}, w, 40.0);
    if (!t.extinction_time) continue;
    if (t.first_hit.count(Site{25})) continue;
    CHECK(!hitting_time(t, Site{25}).has_value());
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("suffix replay: the shifted field continues the base run exactly") {
  for (int i = 0; i < 30; ++i) {
    uint64_t seed = prf::derive_seed(500, static_cast<uint64_t>(i));
    HarrisField f(seed, 1, 3.0);
    Window w{10, BoundaryPolicy::flag};
    const double split = 2.0, total = 6.0;
    Trajectory base = simulate(f, 2.4, {Site::origin()}, w, total);
    Trajectory head = simulate(f, 2.4, {Site::origin()}, w, split);
    Trajectory tail =
        simulate(f.shift_time(split), 2.4, head.final_config, w, total - split);
    CHECK(tail.final_config == base.final_config);
    if (base.extinction_time && *base.extinction_time > split) {
      REQUIRE(tail.extinction_time.has_value());
      CHECK(*tail.extinction_time + split == doctest::Approx(*base.extinction_time).epsilon(1e-12));
    }
    // sites first infected after the split match base hits shifted by split
    for (const auto& [s, t] : tail.first_hit) {
      if (t == 0.0) continue;  // tail initial config
      auto bit = base.first_hit.find(s);
      REQUIRE(bit != base.first_hit.end());
      if (bit->second > split)
        CHECK(bit->second == doctest::Approx(t + split).epsilon(1e-12));
      else
        CHECK(bit->second <= split);  // re-infection of a site hit before the split
    }
    for (const auto& [s, t] : base.first_hit)
      if (t > split) {
        REQUIRE(tail.first_hit.count(s) == 1);
        CHECK(tail.first_hit.at(s) + split == doctest::Approx(t).epsilon(1e-12));
      }
  }
}

TEST_CASE("hitting_time and infected_region basics") {
  HarrisField f(62, 1, 3.0);
  Window w{6, BoundaryPolicy::flag};
  Trajectory t = simulate(f, 2.0, {Site::origin()}, w, 5.0);
  CHECK(hitting_time(t, Site::origin()) == 0.0);
  CHECK_THROWS_AS((void)hitting_time(t, Site{99}), std::invalid_argument);
  CHECK_THROWS_AS((void)infected_region(t, -1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)infected_region(t, 6.0), std::invalid_argument);
  CHECK(infected_region(t, 0.0) == std::vector<Site>{Site::origin()});
  auto h2 = infected_region(t, 2.5);
  auto h5 = infected_region(t, 5.0);
  for (const Site& s : h2) CHECK(std::binary_search(h5.begin(), h5.end(), s));
  for (const Site& s : h5) CHECK(w.contains(s, 1));
}

TEST_CASE("hitting a neighbor matches the absorbing oracle probability") {
  // 3-site path window; P(site +1 infected by t) from the uniformized chain
  TinyLattice lat = TinyLattice::path(3);
  const double t = 0.8, lambda = 2.0;
  double expect = hit_probability(lat, lambda, 1u << lat.site_index(Site::origin()),
                                  lat.site_index(Site{1}), t, 1e-12);
  int hit = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    HarrisField f(prf::derive_seed(600, static_cast<uint64_t>(i)), 1, 2.0);
    Trajectory traj = simulate(f, lambda, {Site::origin()}, Window{1, BoundaryPolicy::cutoff}, t);
    hit += hitting_time(traj, Site{1}).has_value();
  }
  double p = static_cast<double>(hit) / n;
  CHECK(std::abs(p - expect) < 3.0 * stats::binomial_stderr(expect, n));
}

TEST_CASE("subcritical runs die out") {
  int alive = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    HarrisField f(prf::derive_seed(700, static_cast<uint64_t>(i)), 1, 3.0);
    Trajectory t = simulate(f, 0.5, {Site::origin()}, Window{50, BoundaryPolicy::flag}, 50.0);
    alive += !t.extinction_time;
  }
  CHECK(static_cast<double>(alive) / n < 0.01);
}

TEST_CASE("boundary flag is raised exactly when the edge of the window is infected") {
  int flagged = 0, reached = 0;
  for (int i = 0; i < 50; ++i) {
    HarrisField f(prf::derive_seed(800, static_cast<uint64_t>(i)), 1, 3.0);
    Window w{3, BoundaryPolicy::flag};
    Trajectory t = simulate(f, 3.0, {Site::origin()}, w, 8.0);
    bool hit_edge = t.first_hit.count(Site{3}) || t.first_hit.count(Site{-3});
    CHECK(t.boundary_hit == hit_edge);
    flagged += t.boundary_hit;
    reached += hit_edge;
    Trajectory tc = simulate(f, 3.0, {Site::origin()}, Window{3, BoundaryPolicy::cutoff}, 8.0);
    CHECK(!tc.boundary_hit);
    CHECK(tc.final_config == t.final_config);
  }
  CHECK(flagged == reached);
  CHECK(flagged > 0);
}

TEST_CASE("survival proxy: exact death time, stabilization, and rate monotonicity") {
  SurvivalPolicy short_pol{20.0, 1.0, 100};
  // dies: the reported time is the shifted run's extinction, absolute
  {
    HarrisField f(prf::derive_seed(900, 4), 1, 3.0);
    const double t0 = 1.25;
    SurvivalOutcome out = survival_proxy(f, 0.8, Site{2}, t0, short_pol);
    if (!out.survives) {
      HarrisField view = f.shift_time(t0).shift_space(Site{2});
      Trajectory t = simulate(view, 0.8, {Site::origin()},
                              Window{proxy_window_radius(1, 0.8, short_pol), BoundaryPolicy::flag},
                              short_pol.t_surv);
      REQUIRE(t.extinction_time.has_value());
      CHECK(out.extinction_time == t0 + *t.extinction_time);
    }
  }
  // monotone in lambda at fixed seed; and the two-horizon fractions agree
  SurvivalPolicy p100{100.0, 1.0, 100};
  SurvivalPolicy p200{200.0, 1.0, 100};
  int n = 150, s100 = 0, s200 = 0;
  for (int i = 0; i < n; ++i) {
    HarrisField f(prf::derive_seed(901, static_cast<uint64_t>(i)), 1, 3.0);
    bool lo = survival_proxy(f, 1.9, Site::origin(), 0.0, p100).survives;
    bool hi = survival_proxy(f, 2.3, Site::origin(), 0.0, p100).survives;
    if (lo) CHECK(hi);
    s100 += survival_proxy(f, 2.0, Site::origin(), 0.0, p100).survives;
    s200 += survival_proxy(f, 2.0, Site::origin(), 0.0, p200).survives;
  }
  double f100 = static_cast<double>(s100) / n, f200 = static_cast<double>(s200) / n;
  double se = std::sqrt(f100 * (1 - f100) / n + f200 * (1 - f200) / n);
  CHECK(std::abs(f100 - f200) <= std::max(3.0 * se, 1.0 / n));
  CHECK(s200 <= s100);  // longer horizon can only remove survivors at matched seeds
}

TEST_CASE("precondition violations throw") {
  HarrisField f(5, 1, 3.0);
  Window w{4, BoundaryPolicy::flag};
  CHECK_THROWS_AS((void)simulate(f, 3.5, {Site::origin()}, w, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(f, 2.0, {Site{9}}, w, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(f, 2.0, {Site::origin()}, w, -1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate_coupled(f, {}, {Site::origin()}, w, 1.0), std::invalid_argument);
}
