#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "contact/prf.hpp"
#include "contact/random_field.hpp"
#include "contact/stats.hpp"

using namespace contact;

TEST_CASE("arrivals are deterministic and site streams carry no marks") {
  HarrisField f(42, 2, 3.0);
  ClockKey e = ClockKey::edge_clock(Site{1, -2}, 1);
  ArrivalSequence a = f.arrivals(e, 10.0);
  ArrivalSequence b = f.arrivals(e, 10.0);
  CHECK(a.times == b.times);
  CHECK(a.marks == b.marks);
  CHECK(a.times.size() == a.marks.size());

  ArrivalSequence s = f.arrivals(ClockKey::site_clock(Site{0, 0}), 10.0);
  CHECK(s.marks.empty());
  for (size_t i = 0; i + 1 < s.times.size(); ++i) CHECK(s.times[i] < s.times[i + 1]);
  for (double t : s.times) {
    CHECK(t > 0.0);
    CHECK(t <= 10.0);
  }
}

TEST_CASE("prefix consistency across horizons is exact") {
  HarrisField f(7, 1, 2.5);
  ClockKey e = ClockKey::edge_clock(Site{3}, 0);
  ArrivalSequence shorter = f.arrivals(e, 4.0);
  ArrivalSequence longer = f.arrivals(e, 11.0);
  REQUIRE(shorter.times.size() <= longer.times.size());
  for (size_t i = 0; i < shorter.times.size(); ++i) {
    CHECK(shorter.times[i] == longer.times[i]);
    CHECK(shorter.marks[i] == longer.marks[i]);
  }
  for (size_t i = shorter.times.size(); i < longer.times.size(); ++i)
    CHECK(longer.times[i] > 4.0);
}

TEST_CASE("edge counts have the Poisson(lambda_max h) mean across keys") {
  HarrisField f(42, 1, 3.0);
  const int keys = 10000;
  const double h = 10.0;
  double total = 0.0;
  for (int k = 0; k < keys; ++k)
    total += static_cast<double>(f.arrivals(ClockKey::edge_clock(Site{k}, 0), h).times.size());
  double mean = total / keys;
  double tol = 3.0 * std::sqrt(30.0 / keys);
  CHECK(std::abs(mean - 30.0) < tol);
}

TEST_CASE("edge counts pass a Poisson GOF over seeds") {
  const double h = 6.0;
  std::vector<long> counts;
  for (int i = 0; i < 4000; ++i) {
    HarrisField f(prf::derive_seed(3, static_cast<uint64_t>(i)), 1, 3.0);
    counts.push_back(static_cast<long>(f.arrivals(ClockKey::edge_clock(Site{0}, 0), h).times.size()));
  }
  auto gof = stats::poisson_gof(counts, 3.0 * h);
  CHECK(gof.p_value > 1e-3);
}

TEST_CASE("thin keeps everything at lambda_max, nothing at zero, and nests") {
  HarrisField f(9, 1, 3.0);
  ClockKey e = ClockKey::edge_clock(Site{0}, 0);
  ArrivalSequence seq = f.arrivals(e, 20.0);

  ArrivalSequence all = thin(seq, 3.0, 3.0);
  CHECK(all.times == seq.times);
  CHECK(thin(seq, 0.0, 3.0).times.empty());

  for (int i = 0; i < 200; ++i) {
    HarrisField g(prf::derive_seed(9, static_cast<uint64_t>(i)), 1, 3.0);
    ArrivalSequence s = g.arrivals(e, 10.0);
    ArrivalSequence lo = thin(s, 1.3, 3.0);
    ArrivalSequence hi = thin(s, 2.1, 3.0);
    size_t j = 0;
    for (double t : lo.times) {
      while (j < hi.times.size() && hi.times[j] < t) ++j;
      REQUIRE(j < hi.times.size());
      CHECK(hi.times[j] == t);
    }
  }
  // thinned counts are Poisson(lambda h) over seeds
  std::vector<long> counts;
  for (int i = 0; i < 4000; ++i) {
    HarrisField g(prf::derive_seed(10, static_cast<uint64_t>(i)), 1, 3.0);
    counts.push_back(static_cast<long>(thin(g.arrivals(e, 10.0), 2.0, 3.0).times.size()));
  }
  auto gof = stats::poisson_gof(counts, 20.0);
  CHECK(gof.p_value > 1e-3);
}

TEST_CASE("shift_time: identity, semigroup, and replayed counts") {
  HarrisField f(21, 1, 3.0);
  ClockKey e = ClockKey::edge_clock(Site{2}, 0);

  ArrivalSequence base = f.arrivals(e, 8.0);
  ArrivalSequence shifted0 = f.shift_time(0.0).arrivals(e, 8.0);
  CHECK(base.times == shifted0.times);
  CHECK(base.marks == shifted0.marks);

  ArrivalSequence two_steps = f.shift_time(1.5).shift_time(2.0).arrivals(e, 5.0);
  ArrivalSequence one_step = f.shift_time(3.5).arrivals(e, 5.0);
  CHECK(two_steps.times == one_step.times);
  CHECK(two_steps.marks == one_step.marks);

  // count on [0,h] of the shifted field equals the base count on (t, t+h]
  const double t = 2.75, h = 6.0;
  ArrivalSequence view = f.shift_time(t).arrivals(e, h);
  ArrivalSequence wide = f.arrivals(e, t + h);
  std::vector<double> expect_times, expect_marks;
  for (size_t i = 0; i < wide.times.size(); ++i)
    if (wide.times[i] > t) {
      expect_times.push_back(wide.times[i] - t);
      expect_marks.push_back(wide.marks[i]);
    }
  REQUIRE(view.times.size() == expect_times.size());
  for (size_t i = 0; i < view.times.size(); ++i) {
    CHECK(view.times[i] == doctest::Approx(expect_times[i]).epsilon(1e-12));
    CHECK(view.marks[i] == expect_marks[i]);  // the index re-numbering rule, exact
  }
}

TEST_CASE("shift_space: identity, inverse, and translation invariance GOF") {
  HarrisField f(33, 2, 3.0);
  ClockKey e = ClockKey::edge_clock(Site{0, 0}, 1);
  Site x{4, -7};

  ArrivalSequence id = f.shift_space(Site::origin()).arrivals(e, 9.0);
  ArrivalSequence base = f.arrivals(e, 9.0);
  CHECK(id.times == base.times);

  ArrivalSequence round = f.shift_space(x).shift_space(-x).arrivals(e, 9.0);
  CHECK(round.times == base.times);
  CHECK(round.marks == base.marks);

  // the shifted clock at the origin is the base clock at x
  ArrivalSequence shifted = f.shift_space(x).arrivals(e, 9.0);
  ArrivalSequence at_x = f.arrivals(ClockKey::edge_clock(x, 1), 9.0);
  CHECK(shifted.times == at_x.times);

  // counts at the origin keys keep the Poisson law under the shift
  std::vector<long> counts;
  for (int i = 0; i < 10000; ++i) {
    HarrisField g(prf::derive_seed(5, static_cast<uint64_t>(i)), 2, 3.0);
    counts.push_back(static_cast<long>(
        g.shift_space(x).arrivals(ClockKey::edge_clock(Site{0, 0}, 0), 4.0).times.size()));
  }
  auto gof = stats::poisson_gof(counts, 12.0);
  CHECK(gof.p_value > 1e-3);
}

TEST_CASE("idem_holds: trivial cases and the exact disagreement rate") {
  HarrisField f(1, 2, 3.0);
  std::vector<ClockKey> S = box_edges(2, 1);
  CHECK(idem_holds(f, S, 5.0, 2.0, 2.0));
  CHECK(idem_holds(f, {}, 5.0, 1.0, 2.5));

  // single edge, lambda_max=3, lambda=2, lambda'=2.3, t=1:
  // P(differ) = 1 - exp(-0.3)
  std::vector<ClockKey> one{ClockKey::edge_clock(Site{0, 0}, 0)};
  int differ = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    HarrisField g(prf::derive_seed(8, static_cast<uint64_t>(i)), 2, 3.0);
    differ += !idem_holds(g, one, 1.0, 2.0, 2.3);
  }
  double p = static_cast<double>(differ) / n;
  double expect = 1.0 - std::exp(-0.3);
  CHECK(std::abs(p - expect) < 3.0 * stats::binomial_stderr(expect, n));

  // Lemma-style linear bound on a box
  int differ_box = 0;
  const double t = 2.0, dl = 0.05;
  for (int i = 0; i < n; ++i) {
    HarrisField g(prf::derive_seed(12, static_cast<uint64_t>(i)), 2, 3.0);
    differ_box += !idem_holds(g, S, t, 2.0, 2.0 + dl);
  }
  double bound = static_cast<double>(S.size()) * t * dl;
  double pbox = static_cast<double>(differ_box) / n;
  CHECK(pbox <= bound + 3.0 * stats::binomial_stderr(std::min(1.0, bound), n));
}

TEST_CASE("box_edges enumerates each canonical edge once") {
  auto edges = box_edges(2, 2);
  // 2 axes * 4 * 5 edges in a 5x5 box
  CHECK(edges.size() == 40);
  std::vector<ClockKey> copy = edges;
  std::sort(copy.begin(), copy.end());
  CHECK(std::adjacent_find(copy.begin(), copy.end()) == copy.end());
  auto edges1 = box_edges(1, 3);
  CHECK(edges1.size() == 6);
}

TEST_CASE("precondition violations throw") {
  HarrisField f(5, 1, 3.0);
  CHECK_THROWS_AS((void)f.arrivals(ClockKey::site_clock(Site{0}), -1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)f.arrivals(ClockKey::site_clock(Site{0, 3}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)f.shift_time(-0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)f.shift_space(Site{0, 1}), std::invalid_argument);
  ArrivalSequence site_seq = f.arrivals(ClockKey::site_clock(Site{0}), 1.0);
  CHECK_THROWS_AS((void)thin(site_seq, 1.0, 3.0), std::invalid_argument);
  ArrivalSequence edge_seq = f.arrivals(ClockKey::edge_clock(Site{0}, 0), 1.0);
  CHECK_THROWS_AS((void)thin(edge_seq, 4.0, 3.0), std::invalid_argument);
  std::vector<ClockKey> S{ClockKey::edge_clock(Site{0}, 0)};
  CHECK_THROWS_AS((void)idem_holds(f, S, 1.0, 0.5, 3.5), std::invalid_argument);
  CHECK_THROWS_AS(HarrisField(1, 0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(HarrisField(1, 1, 0.0), std::invalid_argument);
}
