#include "contactcli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "contact/oracle.hpp"
#include "contactcli/emit.hpp"

namespace contactcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed to write " + (dir / name).string());
}

struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name -> bytes
  std::vector<std::string> caveats;
};

void collect_flags(const std::vector<std::string>& flags, std::vector<std::string>& caveats,
                   const std::string& prefix) {
  for (const std::string& f : flags) caveats.push_back(prefix + f);
}

CommandOutput cmd_simulate(const RunConfig& c) {
  contact::HarrisField field(c.base_seed, c.dimension, c.lambda_max);
  double growth = c.constants.growth_constant > 0
                      ? c.constants.growth_constant
                      : contact::default_growth_constant(c.dimension, c.lambda);
  int radius = c.window_radius > 0
                   ? c.window_radius
                   : static_cast<int>(std::ceil(growth * c.horizon)) + 2;
  contact::Window w{radius, contact::BoundaryPolicy::flag};
  contact::SimulateOptions opts;
  opts.record_events = c.record_events;
  contact::Trajectory traj = contact::simulate(field, c.lambda, c.initial, w, c.horizon, opts);
  CommandOutput out;
  out.files.emplace_back("run.json", trajectory_json(traj, c.dimension));
  if (c.record_events) out.files.emplace_back("events.csv", events_csv(traj, c.dimension));
  if (traj.boundary_hit) out.caveats.push_back("boundary_hit");
  return out;
}

CommandOutput cmd_mu(const RunConfig& c) {
  contact::RunParams p = c.run_params();
  std::vector<MuRow> rows;
  CommandOutput out;
  contact::Estimate direct = contact::estimate_mu_direct(c.lambda, c.x, c.n, p);
  collect_flags(direct.flags, out.caveats, "direct:");
  rows.push_back({c.lambda, c.x, c.n, "direct", std::move(direct)});
  if (c.n_max >= 1) {
    contact::SubadditiveEstimate sub = contact::estimate_mu_subadditive(c.lambda, c.x, c.n_max, p);
    collect_flags(sub.estimate.flags, out.caveats, "subadditive:");
    // the normalized sigma sequence behind the infimum
    std::string seq = "lambda,x,n,value,stderr,regenerated\n";
    for (size_t k = 0; k < sub.sequence.size(); ++k) {
      seq += format_double(c.lambda);
      seq += ',';
      seq += c.x.to_string(c.dimension);
      seq += ',';
      seq += std::to_string(k + 1);
      seq += ',';
      seq += format_double(sub.sequence[k]);
      seq += ',';
      seq += format_double(sub.sequence_stderr[k]);
      seq += ',';
      seq += std::to_string(sub.regenerated[k]);
      seq += '\n';
    }
    out.files.emplace_back("mu_sequence.csv", seq);
    rows.push_back({c.lambda, c.x, sub.best_n, "subadditive", std::move(sub.estimate)});
  }
  out.files.emplace_back("mu.csv", mu_csv(rows, c.dimension));
  return out;
}

CommandOutput cmd_shape(const RunConfig& c) {
  contact::RunParams p = c.run_params();
  std::vector<double> grid = c.lambda_grid.empty() ? std::vector<double>{c.lambda} : c.lambda_grid;
  std::vector<contact::ShapeEstimate> shapes;
  CommandOutput out;
  for (double l : grid) {
    contact::ShapeEstimate s =
        contact::shape_estimate(l, c.shape_t, p, c.shape_directions, c.shape_occupancy);
    collect_flags(s.flags, out.caveats, "shape:");
    shapes.push_back(std::move(s));
  }
  out.files.emplace_back("shape.csv", shape_csv(shapes, c.dimension));
  if (c.shape_occupancy) {
    std::string occ = "lambda,t,site,frequency\n";
    for (const auto& s : shapes) {
      if (!s.occupancy) continue;
      std::vector<contact::Site> sites;
      for (const auto& [site, freq] : s.occupancy->frequency) sites.push_back(site);
      std::sort(sites.begin(), sites.end());
      for (const auto& site : sites) {
        occ += format_double(s.lambda);
        occ += ',';
        occ += format_double(s.t);
        occ += ',';
        occ += site.to_string(c.dimension);
        occ += ',';
        occ += format_double(s.occupancy->frequency.at(site));
        occ += '\n';
      }
    }
    out.files.emplace_back("occupancy.csv", occ);
  }
  const bool wants_svg =
      std::find(c.formats.begin(), c.formats.end(), "svg") != c.formats.end();
  if (wants_svg && c.dimension == 2) out.files.emplace_back("shape.svg", shape_svg(shapes));
  return out;
}

CommandOutput cmd_scan(const RunConfig& c) {
  contact::RunParams p = c.run_params();
  std::vector<contact::Site> dirs = c.directions;
  if (dirs.empty()) dirs.push_back(c.x);
  contact::ScanTable table = contact::continuity_scan(c.lambda_grid, dirs, c.n, p);
  CommandOutput out;
  for (const auto& row : table.rows)
    for (const auto& e : row.mu) collect_flags(e.flags, out.caveats, "scan:");
  out.files.emplace_back("scan.csv", scan_csv(table, c.dimension));
  json diag;
  diag["per_seed_violations"] = table.diagnostics.per_seed_violations;
  diag["ci_violations"] = table.diagnostics.ci_violations;
  diag["max_adjacent_jump"] = table.diagnostics.max_adjacent_jump;
  diag["max_adjacent_jump_stderr"] = table.diagnostics.max_adjacent_jump_stderr;
  out.files.emplace_back("scan_diagnostics.json", diag.dump(2) + "\n");
  const bool wants_svg =
      std::find(c.formats.begin(), c.formats.end(), "svg") != c.formats.end();
  if (wants_svg) out.files.emplace_back("scan.svg", scan_svg(table, c.dimension));
  if (table.diagnostics.per_seed_violations > 0) out.caveats.push_back("per_seed_violations");
  return out;
}

CommandOutput cmd_idem(const RunConfig& c) {
  contact::RunParams p = c.run_params();
  std::vector<contact::ClockKey> S = contact::box_edges(c.dimension, c.idem_box_radius);
  double lp = c.idem_lambda_prime > 0.0 ? c.idem_lambda_prime : c.lambda;
  contact::IdemEstimate est =
      contact::idem_probability(S, c.idem_t, c.lambda, lp, c.replicas, p);
  IdemRow row{c.lambda, lp, static_cast<long>(S.size()), c.idem_t, std::move(est)};
  CommandOutput out;
  out.files.emplace_back("idem.csv", idem_csv({row}));
  return out;
}

CommandOutput cmd_goodgrowth(const RunConfig& c) {
  contact::RunParams p = c.run_params();
  const double lambda0 = c.gg_lambda0 > 0.0 ? c.gg_lambda0 : c.lambda;
  contact::RunParams ref_params = p;
  ref_params.replicas = c.gg_reference_replicas;
  contact::ShapeEstimate ref = contact::shape_estimate(lambda0, c.gg_reference_t, ref_params);
  CommandOutput out;
  collect_flags(ref.flags, out.caveats, "reference_shape:");
  contact::Estimate est =
      contact::good_growth_probability(c.lambda, lambda0, ref, c.goodgrowth, c.replicas, p);
  GoodGrowthRow row;
  row.lambda = c.lambda;
  row.lambda0 = lambda0;
  row.params = c.goodgrowth;
  row.estimate = std::move(est);
  row.s_size = contact::good_growth_determining_edges(c.dimension, c.goodgrowth.L, c.goodgrowth.N);
  row.t_box = c.goodgrowth.alpha * c.goodgrowth.L * c.goodgrowth.N;
  row.lemma1_budget = static_cast<double>(row.s_size) * row.t_box * (c.lambda - lambda0);
  out.files.emplace_back("goodgrowth.csv", goodgrowth_csv({row}));
  return out;
}

CommandOutput cmd_oracle_check(const RunConfig& c) {
  contact::TinyLattice lat = contact::TinyLattice::path(c.oracle_path_sites);
  contact::OracleCheckOptions opts;
  opts.oracle_lambda = c.oracle_lambda;
  opts.lambda_max = c.lambda_max;
  opts.base_seed = c.base_seed;
  opts.threads = c.threads;
  contact::OracleReport rep =
      contact::mc_vs_oracle(lat, c.lambda, c.oracle_t, c.oracle_replicas, c.oracle_alpha_level, opts);
  CommandOutput out;
  double ol = c.oracle_lambda > 0.0 ? c.oracle_lambda : c.lambda;
  out.files.emplace_back("oracle.json", oracle_json(rep, c.lambda, ol, c.oracle_t));
  if (!rep.pass) out.caveats.push_back("oracle_gof_failed");
  return out;
}

bool exhausted(const std::vector<std::string>& caveats) {
  for (const std::string& c : caveats)
    if (c.find("boundary_cap_exceeded") != std::string::npos ||
        c.find("no_accepted") != std::string::npos)
      return true;
  return false;
}

}  // namespace

RunResult run(const std::string& command, const RunConfig& config) {
  RunResult result;
  const std::string started = now_iso8601();
  try {
    validate(config, command);
  } catch (const ConfigError& e) {
    result.exit_code = 2;
    result.error = e.what();
    json err;
    err["error"] = e.what();
    err["kind"] = "schema_violation";
    err["command"] = command;
    try {
      write_file(config.output_dir, "error.json", err.dump(2) + "\n");
    } catch (...) {
    }
    return result;
  }
  try {
    CommandOutput out;
    if (command == "simulate") out = cmd_simulate(config);
    else if (command == "mu") out = cmd_mu(config);
    else if (command == "shape") out = cmd_shape(config);
    else if (command == "scan") out = cmd_scan(config);
    else if (command == "idem") out = cmd_idem(config);
    else if (command == "goodgrowth") out = cmd_goodgrowth(config);
    else out = cmd_oracle_check(config);

    for (const auto& [name, bytes] : out.files) {
      write_file(config.output_dir, name, bytes);
      result.outputs.push_back(name);
    }
    result.caveats = out.caveats;
    if (exhausted(out.caveats)) {
      result.exit_code = 3;
      result.error = "resource exhaustion beyond retry caps; partial results flagged";
    }

    json manifest;
    manifest["artifact"] = "contact-shape";
    manifest["version"] = kArtifactVersion;
    manifest["command"] = command;
    manifest["config"] = config_to_json(config);
    manifest["started_at"] = started;
    manifest["finished_at"] = now_iso8601();
    manifest["outputs"] = result.outputs;
    manifest["caveats"] = result.caveats;
    manifest["exit_code"] = result.exit_code;
    // the survival proxy stands in for {tau = infinity}; its misclassification
    // shrinks exponentially in survival.t_surv
    manifest["notes"] = json::array({"survival conditioning uses the finite-horizon proxy"});
    write_file(config.output_dir, "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::invalid_argument& e) {
    result.exit_code = 2;
    result.error = e.what();
    json err;
    err["error"] = e.what();
    err["kind"] = "precondition_violation";
    err["command"] = command;
    try {
      write_file(config.output_dir, "error.json", err.dump(2) + "\n");
    } catch (...) {
    }
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.error = e.what();
  }
  return result;
}

RunResult run_from_manifest(const std::string& manifest_path,
                            const std::string& output_dir_override) {
  std::ifstream in(manifest_path);
  if (!in) {
    RunResult r;
    r.exit_code = 2;
    r.error = "cannot open manifest: " + manifest_path;
    return r;
  }
  json manifest = json::parse(in, nullptr, true);
  RunConfig config = config_from_json(manifest.at("config"));
  if (!output_dir_override.empty()) config.output_dir = output_dir_override;
  return run(manifest.at("command").get<std::string>(), config);
}

}  // namespace contactcli
