#include "contact/random_field.hpp"

#include <cmath>
#include <stdexcept>

namespace contact {

namespace {
constexpr uint64_t kGapPurpose = 0x676170ull;    // inter-arrival gaps
constexpr uint64_t kMarkPurpose = 0x6d61726bull;  // edge marks
}  // namespace

HarrisField::HarrisField(uint64_t seed, int dimension, double lambda_max)
    : seed_(seed), dim_(dimension), lambda_max_(lambda_max) {
  if (dimension < 1 || dimension > kMaxDim)
    throw std::invalid_argument("HarrisField: dimension out of range");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("HarrisField: lambda_max must be positive");
}

void HarrisField::validate_key(const ClockKey& key) const {
  for (int i = dim_; i < kMaxDim; ++i)
    if (key.site[i] != 0) throw std::invalid_argument("ClockKey: dimension mismatch");
  if (key.kind == ClockKind::edge && key.axis >= dim_)
    throw std::invalid_argument("ClockKey: edge axis out of range");
}

uint64_t HarrisField::stream_key(const ClockKey& base_key, uint64_t purpose) const {
  uint64_t h = prf::absorb(seed_, purpose);
  h = prf::absorb(h, static_cast<uint64_t>(base_key.kind));
  h = prf::absorb(h, base_key.axis);
  for (int i = 0; i < kMaxDim; ++i)
    h = prf::absorb(h, static_cast<uint64_t>(static_cast<int64_t>(base_key.site[i])));
  return h;
}

ArrivalCursor HarrisField::cursor(const ClockKey& key) const {
  validate_key(key);
  ClockKey base = key;
  base.site = key.site + space_offset_;
  double rate = key.kind == ClockKind::edge ? lambda_max_ : 1.0;
  uint64_t mark_key = key.kind == ClockKind::edge ? stream_key(base, kMarkPurpose) : 0;
  return ArrivalCursor(stream_key(base, kGapPurpose), mark_key, rate, time_offset_);
}

ArrivalSequence HarrisField::arrivals(const ClockKey& key, double horizon) const {
  if (horizon < 0.0) throw std::invalid_argument("arrivals: negative horizon");
  ArrivalSequence seq;
  seq.key = key;
  seq.horizon = horizon;
  ArrivalCursor cur = cursor(key);
  while (cur.time() <= horizon) {
    seq.times.push_back(cur.time());
    if (key.kind == ClockKind::edge) seq.marks.push_back(cur.mark());
    cur.next();
  }
  return seq;
}

HarrisField HarrisField::shift_time(double t) const {
  if (t < 0.0) throw std::invalid_argument("shift_time: negative t");
  HarrisField f = *this;
  f.time_offset_ = time_offset_ + t;
  return f;
}

HarrisField HarrisField::shift_space(const Site& x) const {
  for (int i = dim_; i < kMaxDim; ++i)
    if (x[i] != 0) throw std::invalid_argument("shift_space: dimension mismatch");
  HarrisField f = *this;
  f.space_offset_ = space_offset_ + x;
  return f;
}

ArrivalSequence thin(const ArrivalSequence& seq, double lambda, double lambda_max) {
  if (seq.key.kind != ClockKind::edge) throw std::invalid_argument("thin: site-key input");
  if (lambda < 0.0 || lambda > lambda_max) throw std::invalid_argument("thin: lambda out of range");
  ArrivalSequence out;
  out.key = seq.key;
  out.horizon = seq.horizon;
  const double threshold = lambda / lambda_max;
  for (size_t i = 0; i < seq.times.size(); ++i) {
    if (seq.marks[i] <= threshold) {
      out.times.push_back(seq.times[i]);
      out.marks.push_back(seq.marks[i]);
    }
  }
  return out;
}

bool idem_holds(const HarrisField& field, std::span<const ClockKey> S, double t,
                double lambda, double lambda_prime) {
  if (t < 0.0) throw std::invalid_argument("idem_holds: negative t");
  for (double l : {lambda, lambda_prime})
    if (!(l > 0.0) || l > field.lambda_max())
      throw std::invalid_argument("idem_holds: rate out of range");
  const double lo = std::min(lambda, lambda_prime) / field.lambda_max();
  const double hi = std::max(lambda, lambda_prime) / field.lambda_max();
  if (lo == hi) return true;
  for (const ClockKey& e : S) {
    if (e.kind != ClockKind::edge) throw std::invalid_argument("idem_holds: site key in S");
    ArrivalCursor cur = field.cursor(e);
    for (; cur.time() <= t; cur.next()) {
      double u = cur.mark();
      if (u > lo && u <= hi) return false;
    }
  }
  return true;
}

std::vector<ClockKey> box_edges(int dim, int radius) {
  std::vector<ClockKey> edges;
  Site s;
  // iterate the box in odometer order
  for (int i = 0; i < dim; ++i) s[i] = -radius;
  while (true) {
    for (int a = 0; a < dim; ++a)
      if (s[a] < radius) edges.push_back(ClockKey::edge_clock(s, a));
    int i = 0;
    while (i < dim && s[i] == radius) s[i++] = -radius;
    if (i == dim) break;
    ++s[i];
  }
  return edges;
}

}  // namespace contact
