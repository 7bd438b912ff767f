#include <cstdio>
#include <fstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "contactcli/commands.hpp"
#include "contactcli/config.hpp"

using contactcli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"contact-shape: supercritical contact process simulation and shape estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  RunConfig overrides;
  bool has_lambda = false, has_seed = false, has_replicas = false, has_dim = false;
  bool has_lmax = false, has_horizon = false, has_radius = false, has_n = false;
  bool has_nmax = false, has_tsurv = false, has_threads = false;
  std::vector<std::string> formats;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--output-dir", output_dir, "output directory");
    cmd->add_option("--lambda", overrides.lambda, "infection rate")->each([&](std::string) { has_lambda = true; });
    cmd->add_option("--lambda-max", overrides.lambda_max, "coupling ceiling rate")->each([&](std::string) { has_lmax = true; });
    cmd->add_option("--seed", overrides.base_seed, "base seed")->each([&](std::string) { has_seed = true; });
    cmd->add_option("--replicas", overrides.replicas, "replica count")->each([&](std::string) { has_replicas = true; });
    cmd->add_option("--dimension", overrides.dimension, "lattice dimension")->each([&](std::string) { has_dim = true; });
    cmd->add_option("--horizon", overrides.horizon, "time horizon (0 = auto)")->each([&](std::string) { has_horizon = true; });
    cmd->add_option("--window-radius", overrides.window_radius, "window radius (0 = auto)")->each([&](std::string) { has_radius = true; });
    cmd->add_option("--n", overrides.n, "scaling index n")->each([&](std::string) { has_n = true; });
    cmd->add_option("--n-max", overrides.n_max, "subadditive n_max (0 = off)")->each([&](std::string) { has_nmax = true; });
    cmd->add_option("--t-surv", overrides.survival.t_surv, "survival proxy horizon")->each([&](std::string) { has_tsurv = true; });
    cmd->add_option("--threads", overrides.threads, "worker cap (<= CONTACT_SHAPE_THREADS)")->each([&](std::string) { has_threads = true; });
    cmd->add_option("--format", formats, "output formats (csv, json, svg)");
    cmd->add_flag("--record-events", overrides.record_events, "store the applied event log (simulate)");
  };

  for (const std::string& name : contactcli::known_commands()) add_common(app.add_subcommand(name));

  auto* rerun = app.add_subcommand("rerun", "re-run the config stored in a manifest");
  std::string manifest_path;
  rerun->add_option("manifest", manifest_path, "path to manifest.json")->required();
  rerun->add_option("--output-dir", output_dir, "output directory override");

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  if (sub->get_name() == "rerun") {
    contactcli::RunResult r = contactcli::run_from_manifest(manifest_path, output_dir);
    if (r.exit_code != 0) std::fprintf(stderr, "error: %s\n", r.error.c_str());
    return r.exit_code;
  }

  RunConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config %s\n", config_path.c_str());
      return 2;
    }
    try {
      config = contactcli::config_from_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  if (has_lambda) config.lambda = overrides.lambda;
  if (has_lmax) config.lambda_max = overrides.lambda_max;
  if (has_seed) config.base_seed = overrides.base_seed;
  if (has_replicas) config.replicas = overrides.replicas;
  if (has_dim) config.dimension = overrides.dimension;
  if (has_horizon) config.horizon = overrides.horizon;
  if (has_radius) config.window_radius = overrides.window_radius;
  if (has_n) config.n = overrides.n;
  if (has_nmax) config.n_max = overrides.n_max;
  if (has_tsurv) config.survival.t_surv = overrides.survival.t_surv;
  if (has_threads) config.threads = overrides.threads;
  if (overrides.record_events) config.record_events = true;
  if (!formats.empty()) config.formats = formats;
  if (!output_dir.empty()) config.output_dir = output_dir;

  contactcli::RunResult r = contactcli::run(sub->get_name(), config);
  if (r.exit_code != 0) {
    std::fprintf(stderr, "error: %s\n", r.error.c_str());
  } else {
    for (const std::string& f : r.outputs) std::printf("%s/%s\n", config.output_dir.c_str(), f.c_str());
  }
  return r.exit_code;
}
