#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "contact/lattice.hpp"
#include "contact/prf.hpp"

namespace contact {

// Edges sort before site clocks; if two clock times ever compare equal the
// replay applies the infection first, which keeps lazily-activated replays
// consistent with fully-activated ones.
enum class ClockKind : uint8_t { edge = 0, site = 1 };

// Canonical key of one Poisson clock. The undirected edge {s, s + e_axis} is
// keyed by its lexicographically smaller endpoint s.
struct ClockKey {
  ClockKind kind = ClockKind::site;
  Site site{};
  uint8_t axis = 0;  // edges only

  static ClockKey site_clock(const Site& s) { return {ClockKind::site, s, 0}; }
  static ClockKey edge_clock(const Site& s, int axis) {
    return {ClockKind::edge, s, static_cast<uint8_t>(axis)};
  }

  Site other_endpoint() const { return site + Site::unit(axis); }

  friend bool operator==(const ClockKey&, const ClockKey&) = default;
  friend auto operator<=>(const ClockKey&, const ClockKey&) = default;
};

struct ClockKeyHash {
  size_t operator()(const ClockKey& k) const noexcept {
    return SiteHash{}(k.site) ^ prf::mix((static_cast<uint64_t>(k.kind) << 8) | k.axis);
  }
};

// One clock realization up to a horizon. Times are strictly increasing and
// lie in (0, horizon]; edge arrivals carry their uniform marks.
struct ArrivalSequence {
  ClockKey key;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<double> marks;  // empty for site keys
};

// Incremental generator for one clock stream. Skips the base arrivals at or
// before the field's time offset and reports times relative to the shifted
// origin; mark indices keep counting through the skip, which is exactly the
// index re-numbering the time shift requires.
class ArrivalCursor {
 public:
  ArrivalCursor(uint64_t gap_key, uint64_t mark_key, double rate, double time_offset)
      : gap_key_(gap_key), mark_key_(mark_key), rate_(rate), offset_(time_offset) {
    advance_base();
    while (base_time_ <= offset_) advance_base();
  }

  // Time of the current arrival, relative to the shifted origin; > 0 always.
  double time() const { return base_time_ - offset_; }
  // Uniform mark of the current arrival (edge streams).
  double mark() const { return prf::uniform_open(mark_key_, index_ - 1); }

  void next() { advance_base(); }

  // Drop arrivals strictly before t (relative time).
  void seek(double t) {
    while (time() < t) next();
  }

 private:
  void advance_base() {
    double u = prf::uniform_open(gap_key_, index_++);
    double t = base_time_ - std::log(u) / rate_;
    // continuous gaps make ties impossible; guard against rounding anyway
    if (t <= base_time_) t = std::nextafter(base_time_, std::numeric_limits<double>::infinity());
    base_time_ = t;
  }

  uint64_t gap_key_;
  uint64_t mark_key_;
  double rate_;
  double offset_;
  uint64_t index_ = 0;
  double base_time_ = 0.0;
};

// Deterministic realization of the whole space-time field: one rate-lambda_max
// Poisson clock with uniform marks per edge, one rate-1 clock per site, all
// derived from a 64-bit seed. Shifts return views over the same realization.
class HarrisField {
 public:
  HarrisField(uint64_t seed, int dimension, double lambda_max);

  uint64_t seed() const { return seed_; }
  int dimension() const { return dim_; }
  double lambda_max() const { return lambda_max_; }
  double time_offset() const { return time_offset_; }
  const Site& space_offset() const { return space_offset_; }

  ArrivalSequence arrivals(const ClockKey& key, double horizon) const;
  ArrivalCursor cursor(const ClockKey& key) const;

  HarrisField shift_time(double t) const;
  HarrisField shift_space(const Site& x) const;

  void validate_key(const ClockKey& key) const;

 private:
  uint64_t stream_key(const ClockKey& base_key, uint64_t purpose) const;

  uint64_t seed_;
  int dim_;
  double lambda_max_;
  double time_offset_ = 0.0;
  Site space_offset_{};
};

// Keep exactly the arrivals whose mark is <= lambda / lambda_max.
ArrivalSequence thin(const ArrivalSequence& seq, double lambda, double lambda_max);

// True iff the thinned restrictions to [0,t] at lambda and lambda_prime
// coincide on every edge of S, i.e. no arrival before t carries a mark in
// (min/lambda_max, max/lambda_max].
bool idem_holds(const HarrisField& field, std::span<const ClockKey> S, double t,
                double lambda, double lambda_prime);

// All canonical edges with both endpoints in [-radius, radius]^dim.
std::vector<ClockKey> box_edges(int dim, int radius);

}  // namespace contact
