#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "contact/simulate.hpp"

// Shared event-driven replay. A replay carries up to 64 coupled layers over
// one clock realization: either one infection rate per layer (multi-lambda
// coupling) or one start configuration per layer at a shared rate
// (multi-origin coupling). Clocks are activated lazily, so the cost scales
// with the space-time extent of the infected cluster, not with the window.
namespace contact::detail {

inline constexpr int kMaxLayers = 64;

struct LayerResult {
  std::unordered_map<Site, double, SiteHash> first_hit;
  std::optional<double> extinction_time;
  bool boundary_hit = false;
  std::vector<EventRecord> events;
  std::unordered_map<Site, WatchHistory, SiteHash> watch;
  std::vector<Site> final_sites;  // sorted
};

struct ReplayConfig {
  const HarrisField* field = nullptr;
  Window window{};
  double horizon = 0.0;
  // shared_rate == false: one ascending rate per layer.
  // shared_rate == true: lambdas has a single entry shared by all layers.
  std::vector<double> lambdas;
  bool shared_rate = false;
  int layer_count = 0;
  std::vector<std::pair<Site, uint64_t>> initial;  // site -> layer mask
  bool record_events = false;
  bool record_first_hits = true;
  bool record_final = true;
  std::vector<Site> watch_sites;
  bool stop_when_all_dead = true;
};

std::vector<LayerResult> replay(const ReplayConfig& cfg);

}  // namespace contact::detail
