#pragma once

#include <string>
#include <vector>

#include "contact/estimators.hpp"
#include "contact/oracle.hpp"
#include "contact/simulate.hpp"

namespace contactcli {

// Shortest round-trip decimal form; the canonical float encoding for every
// emitted file, so parse-and-re-emit is byte identical.
std::string format_double(double v);
std::string format_flags(const std::vector<std::string>& flags);

// scan.csv: lambda,direction,mu_hat,stderr,accepted,replicas,flags
std::string scan_csv(const contact::ScanTable& table, int dimension);
contact::ScanTable parse_scan_csv(const std::string& text, int dimension);

// shape.csv: lambda,t,direction,radius,stderr
std::string shape_csv(const std::vector<contact::ShapeEstimate>& shapes, int dimension);
std::vector<contact::ShapeEstimate> parse_shape_csv(const std::string& text, int dimension);

// idem.csv: lambda,lambda_prime,S_size,t,p_hat,stderr,analytic_bound
struct IdemRow {
  double lambda = 0.0;
  double lambda_prime = 0.0;
  long s_size = 0;
  double t = 0.0;
  contact::IdemEstimate estimate;
};
std::string idem_csv(const std::vector<IdemRow>& rows);
std::vector<IdemRow> parse_idem_csv(const std::string& text);

// mu.csv: lambda,x,n,estimator,value,stderr,accepted,replicas,flags
struct MuRow {
  double lambda = 0.0;
  contact::Site x{};
  int n = 0;
  std::string estimator;  // "direct" | "subadditive"
  contact::Estimate estimate;
};
std::string mu_csv(const std::vector<MuRow>& rows, int dimension);

// goodgrowth.csv:
// lambda,lambda0,alpha,L,N,epsilon,p_hat,stderr,replicas,S_size,t_box,lemma1_budget
struct GoodGrowthRow {
  double lambda = 0.0;
  double lambda0 = 0.0;
  contact::GoodGrowthParams params;
  contact::Estimate estimate;
  long s_size = 0;
  double t_box = 0.0;
  double lemma1_budget = 0.0;
};
std::string goodgrowth_csv(const std::vector<GoodGrowthRow>& rows);

// events.csv: time,kind,site,source
std::string events_csv(const contact::Trajectory& traj, int dimension);

std::string trajectory_json(const contact::Trajectory& traj, int dimension);
std::string oracle_json(const contact::OracleReport& report, double lambda, double oracle_lambda,
                        double t);

// SVG plots; conveniences, the CSV is the contract.
std::string scan_svg(const contact::ScanTable& table, int dimension);
std::string shape_svg(const std::vector<contact::ShapeEstimate>& shapes);

}  // namespace contactcli
