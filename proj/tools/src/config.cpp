#include "contactcli/config.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace contactcli {

using nlohmann::json;

namespace {

contact::Site site_from_json(const json& j, int dimension) {
  if (!j.is_array() || j.size() != static_cast<size_t>(dimension))
    throw ConfigError("site must be an array of 'dimension' integers");
  contact::Site s;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw ConfigError("site coordinates must be integers");
    s[static_cast<int>(i)] = j[i].get<int32_t>();
  }
  return s;
}

json site_to_json(const contact::Site& s, int dimension) {
  json a = json::array();
  for (int i = 0; i < dimension; ++i) a.push_back(s[i]);
  return a;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

contact::RunParams RunConfig::run_params() const {
  contact::RunParams p;
  p.dimension = dimension;
  p.lambda_max = lambda_max;
  p.base_seed = base_seed;
  p.replicas = replicas;
  p.horizon = horizon;
  p.window_radius = window_radius;
  p.survival = survival;
  p.constants = constants;
  p.min_accepted = min_accepted;
  p.boundary_retry_cap = boundary_retry_cap;
  p.threads = threads;
  return p;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  read(j, "dimension", c.dimension);
  if (c.dimension < 1 || c.dimension > contact::kMaxDim)
    throw ConfigError("dimension out of range");
  read(j, "lambda", c.lambda);
  read(j, "lambda_grid", c.lambda_grid);
  read(j, "lambda_max", c.lambda_max);
  read(j, "base_seed", c.base_seed);
  read(j, "replicas", c.replicas);
  read(j, "horizon", c.horizon);
  read(j, "window_radius", c.window_radius);
  if (j.contains("survival")) {
    const json& s = j.at("survival");
    read(s, "t_surv", c.survival.t_surv);
    read(s, "window_factor", c.survival.window_factor);
    read(s, "max_steps", c.survival.max_steps);
  }
  if (j.contains("constants")) {
    const json& s = j.at("constants");
    read(s, "m1", c.constants.m1);
    read(s, "growth_constant", c.constants.growth_constant);
    read(s, "hit_time_budget", c.constants.hit_time_budget);
  }
  read(j, "min_accepted", c.min_accepted);
  read(j, "boundary_retry_cap", c.boundary_retry_cap);
  read(j, "threads", c.threads);

  if (j.contains("x")) c.x = site_from_json(j.at("x"), c.dimension);
  read(j, "n", c.n);
  read(j, "n_max", c.n_max);
  if (j.contains("directions")) {
    c.directions.clear();
    for (const json& d : j.at("directions")) c.directions.push_back(site_from_json(d, c.dimension));
  }

  if (j.contains("shape")) {
    const json& s = j.at("shape");
    read(s, "t", c.shape_t);
    read(s, "occupancy", c.shape_occupancy);
    if (s.contains("directions"))
      c.shape_directions = s.at("directions").get<std::vector<std::vector<double>>>();
  }

  if (j.contains("idem")) {
    const json& s = j.at("idem");
    read(s, "box_radius", c.idem_box_radius);
    read(s, "t", c.idem_t);
    read(s, "lambda_prime", c.idem_lambda_prime);
  }

  if (j.contains("goodgrowth")) {
    const json& s = j.at("goodgrowth");
    read(s, "alpha", c.goodgrowth.alpha);
    read(s, "L", c.goodgrowth.L);
    read(s, "N", c.goodgrowth.N);
    read(s, "epsilon", c.goodgrowth.epsilon);
    read(s, "t0_step", c.goodgrowth.t0_step);
    read(s, "lambda0", c.gg_lambda0);
    read(s, "reference_t", c.gg_reference_t);
    read(s, "reference_replicas", c.gg_reference_replicas);
  }

  if (j.contains("oracle")) {
    const json& s = j.at("oracle");
    read(s, "path_sites", c.oracle_path_sites);
    read(s, "t", c.oracle_t);
    read(s, "alpha_level", c.oracle_alpha_level);
    read(s, "oracle_lambda", c.oracle_lambda);
    read(s, "replicas", c.oracle_replicas);
  }

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    read(s, "record_events", c.record_events);
    if (s.contains("initial")) {
      c.initial.clear();
      for (const json& site : s.at("initial"))
        c.initial.push_back(site_from_json(site, c.dimension));
    }
  }

  read(j, "output_dir", c.output_dir);
  read(j, "formats", c.formats);
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["lambda"] = c.lambda;
  if (!c.lambda_grid.empty()) j["lambda_grid"] = c.lambda_grid;
  j["lambda_max"] = c.lambda_max;
  j["base_seed"] = c.base_seed;
  j["replicas"] = c.replicas;
  j["horizon"] = c.horizon;
  j["window_radius"] = c.window_radius;
  j["survival"] = {{"t_surv", c.survival.t_surv},
                   {"window_factor", c.survival.window_factor},
                   {"max_steps", c.survival.max_steps}};
  j["constants"] = {{"m1", c.constants.m1},
                    {"growth_constant", c.constants.growth_constant},
                    {"hit_time_budget", c.constants.hit_time_budget}};
  j["min_accepted"] = c.min_accepted;
  j["boundary_retry_cap"] = c.boundary_retry_cap;
  j["threads"] = c.threads;
  j["x"] = site_to_json(c.x, c.dimension);
  j["n"] = c.n;
  j["n_max"] = c.n_max;
  if (!c.directions.empty()) {
    json dirs = json::array();
    for (const auto& d : c.directions) dirs.push_back(site_to_json(d, c.dimension));
    j["directions"] = dirs;
  }
  j["shape"] = {{"t", c.shape_t}, {"occupancy", c.shape_occupancy}};
  if (!c.shape_directions.empty()) j["shape"]["directions"] = c.shape_directions;
  j["idem"] = {{"box_radius", c.idem_box_radius},
               {"t", c.idem_t},
               {"lambda_prime", c.idem_lambda_prime}};
  j["goodgrowth"] = {{"alpha", c.goodgrowth.alpha},
                     {"L", c.goodgrowth.L},
                     {"N", c.goodgrowth.N},
                     {"epsilon", c.goodgrowth.epsilon},
                     {"t0_step", c.goodgrowth.t0_step},
                     {"lambda0", c.gg_lambda0},
                     {"reference_t", c.gg_reference_t},
                     {"reference_replicas", c.gg_reference_replicas}};
  j["oracle"] = {{"path_sites", c.oracle_path_sites},
                 {"t", c.oracle_t},
                 {"alpha_level", c.oracle_alpha_level},
                 {"oracle_lambda", c.oracle_lambda},
                 {"replicas", c.oracle_replicas}};
  json init = json::array();
  for (const auto& s : c.initial) init.push_back(site_to_json(s, c.dimension));
  j["simulate"] = {{"record_events", c.record_events}, {"initial", init}};
  j["output_dir"] = c.output_dir;
  j["formats"] = c.formats;
  return j;
}

std::vector<std::string> known_commands() {
  return {"simulate", "mu", "shape", "scan", "idem", "goodgrowth", "oracle-check"};
}

void validate(const RunConfig& c, const std::string& command) {
  auto cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw ConfigError("unknown command: " + command);
  if (!(c.lambda_max > 0.0)) throw ConfigError("lambda_max must be positive");
  if (c.lambda > c.lambda_max) throw ConfigError("lambda exceeds lambda_max");
  if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (c.replicas < 1) throw ConfigError("replicas must be >= 1");
  for (size_t i = 0; i + 1 < c.lambda_grid.size(); ++i)
    if (!(c.lambda_grid[i] < c.lambda_grid[i + 1]))
      throw ConfigError("lambda_grid must be strictly increasing");
  for (double l : c.lambda_grid) {
    if (l > c.lambda_max) throw ConfigError("lambda_grid entry exceeds lambda_max");
    if (!(l > 0.0)) throw ConfigError("lambda_grid entries must be positive");
  }
  if (!(c.survival.t_surv > 0.0)) throw ConfigError("survival.t_surv must be positive");
  if (!(c.survival.window_factor > 0.0))
    throw ConfigError("survival.window_factor must be positive");
  if (c.survival.max_steps < 1) throw ConfigError("survival.max_steps must be >= 1");
  if (c.constants.m1 < 0.0) throw ConfigError("constants.m1 must be >= 0");
  if (c.horizon < 0.0) throw ConfigError("horizon must be >= 0");
  if (c.window_radius < 0) throw ConfigError("window_radius must be >= 0");

  for (const std::string& f : c.formats)
    if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown format: " + f);
  const bool wants_svg = std::find(c.formats.begin(), c.formats.end(), "svg") != c.formats.end();
  if (wants_svg && command != "scan" && command != "shape")
    throw ConfigError("svg output is only supported for scan curves and 2D shape outlines");
  if (wants_svg && command == "shape" && c.dimension != 2)
    throw ConfigError("shape svg requires dimension 2");

  if (command == "mu" || command == "scan") {
    if (c.n < 1) throw ConfigError("n must be >= 1");
    if (c.n_max < 0) throw ConfigError("n_max must be >= 0");
  }
  if (command == "scan") {
    if (c.lambda_grid.empty()) throw ConfigError("scan requires lambda_grid");
    if (c.lambda_grid.size() > 64) throw ConfigError("lambda_grid supports at most 64 rates");
  }
  if (command == "shape" && !(c.shape_t > 0.0)) throw ConfigError("shape.t must be positive");
  if (command == "idem") {
    if (c.idem_box_radius < 0) throw ConfigError("idem.box_radius must be >= 0");
    if (c.idem_t < 0.0) throw ConfigError("idem.t must be >= 0");
    double lp = c.idem_lambda_prime > 0.0 ? c.idem_lambda_prime : c.lambda;
    if (lp > c.lambda_max) throw ConfigError("idem.lambda_prime exceeds lambda_max");
  }
  if (command == "goodgrowth") {
    if (!(c.goodgrowth.alpha > 0.0 && c.goodgrowth.alpha < 1.0))
      throw ConfigError("goodgrowth.alpha must lie in (0,1)");
    if (c.goodgrowth.L < 1 || c.goodgrowth.N < 1)
      throw ConfigError("goodgrowth.L and goodgrowth.N must be >= 1");
    if (c.goodgrowth.alpha * c.goodgrowth.L < 2.0)
      throw ConfigError("goodgrowth requires alpha*L >= 2 so the box times are covered");
    if (!(c.goodgrowth.t0_step > 0.0)) throw ConfigError("goodgrowth.t0_step must be positive");
    double l0 = c.gg_lambda0 > 0.0 ? c.gg_lambda0 : c.lambda;
    if (c.lambda < l0) throw ConfigError("goodgrowth requires lambda >= lambda0");
  }
  if (command == "oracle-check") {
    if (c.oracle_path_sites < 1 || c.oracle_path_sites > 12 || c.oracle_path_sites % 2 == 0)
      throw ConfigError("oracle.path_sites must be odd and in [1,12]");
    if (!(c.oracle_t >= 0.0)) throw ConfigError("oracle.t must be >= 0");
    if (c.oracle_replicas < 1) throw ConfigError("oracle.replicas must be >= 1");
    if (c.oracle_lambda > c.lambda_max)
      throw ConfigError("oracle.oracle_lambda exceeds lambda_max");
  }
  if (command == "simulate") {
    contact::Window w{c.window_radius, contact::BoundaryPolicy::flag};
    if (c.window_radius > 0)
      for (const auto& s : c.initial)
        if (!w.contains(s, c.dimension)) throw ConfigError("initial site outside window");
  }
}

}  // namespace contactcli
