#include "engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace contact::detail {

namespace {

struct Clock {
  ArrivalCursor gen;
  ClockKey key;
  Site a{};  // edge endpoints (a = key.site, b = a + e_axis)
  Site b{};
};

struct HeapEntry {
  double t;
  uint32_t id;
};

struct SiteState {
  uint64_t mask = 0;
  uint64_t ever = 0;
  bool active = false;
  int watch_idx = -1;
  std::vector<double> hit;  // per layer, valid where ever-bit set
};

class Replay {
 public:
  explicit Replay(const ReplayConfig& cfg) : cfg_(cfg), dim_(cfg.field->dimension()) {
    validate();
    layers_ = cfg_.shared_rate ? cfg_.layer_count : static_cast<int>(cfg_.lambdas.size());
    full_mask_ = layers_ == 64 ? ~0ull : ((1ull << layers_) - 1);
    thresholds_.reserve(cfg_.lambdas.size());
    for (double l : cfg_.lambdas) thresholds_.push_back(l / cfg_.field->lambda_max());
    alive_.assign(static_cast<size_t>(layers_), 0);
    results_.resize(static_cast<size_t>(layers_));
    if (cfg_.record_events) events_.resize(static_cast<size_t>(layers_));
  }

  std::vector<LayerResult> run() {
    init_watch();
    init_initial();
    loop();
    return finish();
  }

 private:
  void validate() const {
    if (cfg_.lambdas.empty()) throw std::invalid_argument("replay: no rates");
    for (double l : cfg_.lambdas) {
      if (l < 0.0) throw std::invalid_argument("replay: negative rate");
      if (l > cfg_.field->lambda_max())
        throw std::invalid_argument("replay: lambda > lambda_max");
    }
    if (!cfg_.shared_rate && !std::is_sorted(cfg_.lambdas.begin(), cfg_.lambdas.end()))
      throw std::invalid_argument("replay: rates must be ascending");
    int layers = cfg_.shared_rate ? cfg_.layer_count : static_cast<int>(cfg_.lambdas.size());
    if (layers < 1 || layers > kMaxLayers) throw std::invalid_argument("replay: layer count");
    if (cfg_.horizon < 0.0) throw std::invalid_argument("replay: negative horizon");
    for (const auto& [s, mask] : cfg_.initial) {
      (void)mask;
      if (!cfg_.window.contains(s, cfg_.field->dimension()))
        throw std::invalid_argument("replay: initial site outside window");
    }
  }

  uint64_t accept_mask(double mark) const {
    if (cfg_.shared_rate) return mark <= thresholds_[0] ? full_mask_ : 0;
    // rates ascend, so the accepting rates form a suffix
    auto it = std::lower_bound(thresholds_.begin(), thresholds_.end(), mark);
    size_t idx = static_cast<size_t>(it - thresholds_.begin());
    if (idx >= static_cast<size_t>(layers_)) return 0;
    return full_mask_ & ~((1ull << idx) - 1);
  }

  void init_watch() {
    watch_hist_.resize(cfg_.watch_sites.size());
    for (size_t w = 0; w < cfg_.watch_sites.size(); ++w) {
      watch_hist_[w].resize(static_cast<size_t>(layers_));
      if (!cfg_.window.contains(cfg_.watch_sites[w], dim_))
        throw std::invalid_argument("replay: watch site outside window");
      sites_[cfg_.watch_sites[w]].watch_idx = static_cast<int>(w);
    }
  }

  void init_initial() {
    for (const auto& [s, mask] : cfg_.initial) {
      if (!mask) continue;
      SiteState& st = sites_[s];
      uint64_t bits = mask & full_mask_ & ~st.mask;
      if (!bits) continue;
      st.mask |= bits;
      uint64_t newly = bits & ~st.ever;
      st.ever |= bits;
      if (newly) {
        if (st.hit.empty()) st.hit.assign(static_cast<size_t>(layers_), 0.0);
        for (uint64_t m = newly; m; m &= m - 1)
          st.hit[static_cast<size_t>(std::countr_zero(m))] = 0.0;
      }
      for (uint64_t m = bits; m; m &= m - 1) ++alive_[static_cast<size_t>(std::countr_zero(m))];
      if (st.watch_idx >= 0)
        for (uint64_t m = bits; m; m &= m - 1)
          watch_hist_[static_cast<size_t>(st.watch_idx)][static_cast<size_t>(std::countr_zero(m))]
              .on_times.push_back(0.0);
    }
    for (int l = 0; l < layers_; ++l) {
      if (alive_[static_cast<size_t>(l)] == 0) {
        results_[static_cast<size_t>(l)].extinction_time = 0.0;
        ++dead_layers_;
      }
    }
    for (const auto& [s, mask] : cfg_.initial)
      if (mask & full_mask_) activate(s, 0.0);
  }

  void add_clock(const ClockKey& key, double t) {
    Clock ck{cfg_.field->cursor(key), key};
    if (key.kind == ClockKind::edge) {
      ck.a = key.site;
      ck.b = key.other_endpoint();
    }
    ck.gen.seek(t);
    clocks_.push_back(std::move(ck));
    uint32_t id = static_cast<uint32_t>(clocks_.size() - 1);
    double at = clocks_.back().gen.time();
    if (at <= cfg_.horizon) heap_.push({at, id});
  }

  void activate(const Site& s, double t) {
    {
      SiteState& st = sites_[s];
      if (st.active) return;
      st.active = true;
    }
    add_clock(ClockKey::site_clock(s), t);
    for (int a = 0; a < dim_; ++a) {
      Site up = s + Site::unit(a);
      if (cfg_.window.contains(up, dim_)) try_add_edge(ClockKey::edge_clock(s, a), t);
      Site down = s - Site::unit(a);
      if (cfg_.window.contains(down, dim_)) try_add_edge(ClockKey::edge_clock(down, a), t);
    }
  }

  void try_add_edge(const ClockKey& key, double t) {
    if (live_edges_.insert(key).second) add_clock(key, t);
  }

  uint64_t mask_of(const Site& s) const {
    auto it = sites_.find(s);
    return it == sites_.end() ? 0 : it->second.mask;
  }

  void infect(const Site& s, const Site& src, uint64_t bits, double t) {
    {
      SiteState& st = sites_[s];
      uint64_t newly = bits & ~st.ever;
      st.mask |= bits;
      st.ever |= bits;
      if (newly) {
        if (st.hit.empty()) st.hit.assign(static_cast<size_t>(layers_), 0.0);
        for (uint64_t m = newly; m; m &= m - 1)
          st.hit[static_cast<size_t>(std::countr_zero(m))] = t;
      }
      for (uint64_t m = bits; m; m &= m - 1) ++alive_[static_cast<size_t>(std::countr_zero(m))];
      if (cfg_.window.policy == BoundaryPolicy::flag && cfg_.window.on_boundary(s, dim_))
        boundary_mask_ |= bits;
      if (cfg_.record_events)
        for (uint64_t m = bits; m; m &= m - 1)
          events_[static_cast<size_t>(std::countr_zero(m))].push_back(
              {t, EventKind::infection, s, src});
      if (st.watch_idx >= 0)
        for (uint64_t m = bits; m; m &= m - 1)
          watch_hist_[static_cast<size_t>(st.watch_idx)][static_cast<size_t>(std::countr_zero(m))]
              .on_times.push_back(t);
    }
    activate(s, t);
  }

  void recover(const Site& s, double t) {
    auto it = sites_.find(s);
    if (it == sites_.end()) return;
    uint64_t m = it->second.mask;
    if (!m) return;
    it->second.mask = 0;
    for (uint64_t b = m; b; b &= b - 1) {
      int l = std::countr_zero(b);
      if (--alive_[static_cast<size_t>(l)] == 0) {
        results_[static_cast<size_t>(l)].extinction_time = t;
        ++dead_layers_;
      }
    }
    if (cfg_.record_events)
      for (uint64_t b = m; b; b &= b - 1)
        events_[static_cast<size_t>(std::countr_zero(b))].push_back(
            {t, EventKind::recovery, s, {}});
    if (it->second.watch_idx >= 0)
      for (uint64_t b = m; b; b &= b - 1)
        watch_hist_[static_cast<size_t>(it->second.watch_idx)]
                   [static_cast<size_t>(std::countr_zero(b))]
                       .off_times.push_back(t);
  }

  void loop() {
    while (!heap_.empty()) {
      if (cfg_.stop_when_all_dead && dead_layers_ == layers_) break;
      HeapEntry top = heap_.top();
      if (top.t > cfg_.horizon) break;
      heap_.pop();
      const double t = top.t;
      // infect() can grow clocks_, so take what we need by value first
      const ClockKind kind = clocks_[top.id].key.kind;
      const Site a = clocks_[top.id].a;
      const Site b = clocks_[top.id].b;
      if (kind == ClockKind::site) {
        recover(clocks_[top.id].key.site, t);
      } else {
        double u = clocks_[top.id].gen.mark();
        uint64_t accept = accept_mask(u);
        if (accept) {
          uint64_t ma = mask_of(a);
          uint64_t mb = mask_of(b);
          uint64_t new_b = ma & accept & ~mb;
          uint64_t new_a = mb & accept & ~ma;
          if (new_b) infect(b, a, new_b, t);
          if (new_a) infect(a, b, new_a, t);
        }
      }
      Clock& ck = clocks_[top.id];
      ck.gen.next();
      double nt = ck.gen.time();
      if (nt <= cfg_.horizon) heap_.push({nt, top.id});
    }
  }

  std::vector<LayerResult> finish() {
    for (auto& [s, st] : sites_) {
      if (cfg_.record_first_hits)
        for (uint64_t m = st.ever; m; m &= m - 1) {
          int l = std::countr_zero(m);
          results_[static_cast<size_t>(l)].first_hit.emplace(s, st.hit[static_cast<size_t>(l)]);
        }
      if (cfg_.record_final)
        for (uint64_t m = st.mask; m; m &= m - 1)
          results_[static_cast<size_t>(std::countr_zero(m))].final_sites.push_back(s);
    }
    for (int l = 0; l < layers_; ++l) {
      LayerResult& r = results_[static_cast<size_t>(l)];
      std::sort(r.final_sites.begin(), r.final_sites.end());
      r.boundary_hit = (boundary_mask_ >> l) & 1;
      // applied events were appended in replay order, which is time order
      if (cfg_.record_events) r.events = std::move(events_[static_cast<size_t>(l)]);
      for (size_t w = 0; w < cfg_.watch_sites.size(); ++w)
        r.watch.emplace(cfg_.watch_sites[w], std::move(watch_hist_[w][static_cast<size_t>(l)]));
    }
    return std::move(results_);
  }

  const ReplayConfig& cfg_;
  int dim_;
  int layers_ = 0;
  uint64_t full_mask_ = 0;
  std::vector<double> thresholds_;

  std::unordered_map<Site, SiteState, SiteHash> sites_;
  std::unordered_set<ClockKey, ClockKeyHash> live_edges_;
  std::vector<Clock> clocks_;

  struct Cmp {
    const std::vector<Clock>* clocks;
    bool operator()(const HeapEntry& x, const HeapEntry& y) const {
      if (x.t != y.t) return x.t > y.t;
      return (*clocks)[x.id].key > (*clocks)[y.id].key;
    }
  };
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, Cmp> heap_{Cmp{&clocks_}};

  std::vector<int64_t> alive_;
  int dead_layers_ = 0;
  uint64_t boundary_mask_ = 0;
  std::vector<std::vector<EventRecord>> events_;
  std::vector<std::vector<WatchHistory>> watch_hist_;
  std::vector<LayerResult> results_;
};

}  // namespace

std::vector<LayerResult> replay(const ReplayConfig& cfg) { return Replay(cfg).run(); }

}  // namespace contact::detail
