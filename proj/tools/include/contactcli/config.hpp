#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "contact/estimators.hpp"

namespace contactcli {

// One JSON document drives a whole run; command-line flags override scalar
// fields (flags > file > defaults).
struct RunConfig {
  int dimension = 1;
  double lambda = 2.0;
  std::vector<double> lambda_grid;  // scan and shape accept a grid
  double lambda_max = 3.0;
  uint64_t base_seed = 1;
  long replicas = 1000;
  double horizon = 0.0;    // 0 = auto
  int window_radius = 0;   // 0 = auto
  contact::SurvivalPolicy survival{};
  contact::TheoryConstants constants{};
  long min_accepted = 20;
  int boundary_retry_cap = 3;
  int threads = 0;

  // mu / scan
  contact::Site x{1};
  int n = 10;
  int n_max = 0;  // 0 = direct estimator only
  std::vector<contact::Site> directions;

  // shape
  double shape_t = 30.0;
  bool shape_occupancy = false;
  std::vector<std::vector<double>> shape_directions;

  // idem
  int idem_box_radius = 3;
  double idem_t = 5.0;
  double idem_lambda_prime = 0.0;  // 0 = same as lambda

  // goodgrowth
  contact::GoodGrowthParams goodgrowth{};
  double gg_lambda0 = 0.0;  // 0 = same as lambda
  double gg_reference_t = 30.0;
  long gg_reference_replicas = 400;

  // oracle-check
  int oracle_path_sites = 5;
  double oracle_t = 1.0;
  double oracle_alpha_level = 1e-3;
  double oracle_lambda = 0.0;  // 0 = same as lambda (mismatch control otherwise)
  long oracle_replicas = 20000;

  // simulate
  bool record_events = false;
  std::vector<contact::Site> initial{contact::Site{}};

  std::string output_dir = ".";
  std::vector<std::string> formats{"csv", "json"};

  contact::RunParams run_params() const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// Throws ConfigError on any schema violation; called before any simulation.
void validate(const RunConfig& c, const std::string& command);

std::vector<std::string> known_commands();

}  // namespace contactcli
