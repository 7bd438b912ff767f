#include "contactcli/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace contactcli {

using contact::Estimate;
using contact::ScanTable;
using contact::ShapeEstimate;
using contact::Site;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (i) out += '|';
    out += flags[i];
  }
  return out;
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("bad number in csv: " + s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, size_t columns,
                                                const std::string& header) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      if (line != header) throw std::runtime_error("unexpected csv header: " + line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != columns) throw std::runtime_error("bad csv row: " + line);
    rows.push_back(std::move(fields));
  }
  if (first) throw std::runtime_error("csv missing header");
  return rows;
}

std::vector<std::string> parse_flags(const std::string& s) {
  if (s.empty()) return {};
  return split(s, '|');
}

std::string site_field(const Site& s, int dimension) {
  std::string out;
  for (int i = 0; i < dimension; ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i]);
  }
  return out;
}

Site parse_site_field(const std::string& s, int dimension) {
  auto parts = split(s, ' ');
  if (static_cast<int>(parts.size()) != dimension)
    throw std::runtime_error("bad site field: " + s);
  Site out;
  for (int i = 0; i < dimension; ++i) out[i] = static_cast<int32_t>(std::stol(parts[static_cast<size_t>(i)]));
  return out;
}

std::string vector_field(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> parse_vector_field(const std::string& s) {
  std::vector<double> out;
  for (const std::string& p : split(s, ' ')) out.push_back(parse_double(p));
  return out;
}

constexpr const char* kScanHeader = "lambda,direction,mu_hat,stderr,accepted,replicas,flags";
constexpr const char* kShapeHeader = "lambda,t,direction,radius,stderr";
constexpr const char* kIdemHeader = "lambda,lambda_prime,S_size,t,p_hat,stderr,analytic_bound";
constexpr const char* kMuHeader = "lambda,x,n,estimator,value,stderr,accepted,replicas,flags";
constexpr const char* kGoodGrowthHeader =
    "lambda,lambda0,alpha,L,N,epsilon,p_hat,stderr,replicas,S_size,t_box,lemma1_budget";

}  // namespace

std::string scan_csv(const ScanTable& table, int dimension) {
  std::string out = kScanHeader;
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t j = 0; j < table.directions.size(); ++j) {
      const Estimate& e = row.mu[j];
      out += format_double(row.lambda);
      out += ',';
      out += site_field(table.directions[j], dimension);
      out += ',';
      out += format_double(e.value);
      out += ',';
      out += format_double(e.stderror);
      out += ',';
      out += std::to_string(e.accepted);
      out += ',';
      out += std::to_string(e.replicas);
      out += ',';
      out += format_flags(e.flags);
      out += '\n';
    }
  }
  return out;
}

ScanTable parse_scan_csv(const std::string& text, int dimension) {
  ScanTable table;
  auto rows = parse_csv(text, 7, kScanHeader);
  for (const auto& f : rows) {
    double lambda = parse_double(f[0]);
    Site dir = parse_site_field(f[1], dimension);
    Estimate e;
    e.value = parse_double(f[2]);
    e.stderror = parse_double(f[3]);
    e.accepted = std::stol(f[4]);
    e.replicas = std::stol(f[5]);
    e.flags = parse_flags(f[6]);
    size_t d = 0;
    for (; d < table.directions.size(); ++d)
      if (table.directions[d] == dir) break;
    if (d == table.directions.size()) table.directions.push_back(dir);
    if (table.rows.empty() || table.rows.back().lambda != lambda) {
      table.rows.push_back({lambda, {}});
    }
    table.rows.back().mu.push_back(std::move(e));
  }
  return table;
}

std::string shape_csv(const std::vector<ShapeEstimate>& shapes, int dimension) {
  (void)dimension;
  std::string out = kShapeHeader;
  out += '\n';
  for (const auto& s : shapes) {
    for (size_t j = 0; j < s.directions.size(); ++j) {
      out += format_double(s.lambda);
      out += ',';
      out += format_double(s.t);
      out += ',';
      out += vector_field(s.directions[j]);
      out += ',';
      out += format_double(s.radii[j]);
      out += ',';
      out += format_double(s.radii_stderr[j]);
      out += '\n';
    }
  }
  return out;
}

std::vector<ShapeEstimate> parse_shape_csv(const std::string& text, int dimension) {
  (void)dimension;
  std::vector<ShapeEstimate> shapes;
  auto rows = parse_csv(text, 5, kShapeHeader);
  for (const auto& f : rows) {
    double lambda = parse_double(f[0]);
    double t = parse_double(f[1]);
    if (shapes.empty() || shapes.back().lambda != lambda || shapes.back().t != t) {
      ShapeEstimate s;
      s.lambda = lambda;
      s.t = t;
      shapes.push_back(std::move(s));
    }
    shapes.back().directions.push_back(parse_vector_field(f[2]));
    shapes.back().radii.push_back(parse_double(f[3]));
    shapes.back().radii_stderr.push_back(parse_double(f[4]));
  }
  return shapes;
}

std::string idem_csv(const std::vector<IdemRow>& rows) {
  std::string out = kIdemHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.lambda_prime);
    out += ',';
    out += std::to_string(r.s_size);
    out += ',';
    out += format_double(r.t);
    out += ',';
    out += format_double(r.estimate.p.value);
    out += ',';
    out += format_double(r.estimate.p.stderror);
    out += ',';
    out += format_double(r.estimate.analytic_lower_bound);
    out += '\n';
  }
  return out;
}

std::vector<IdemRow> parse_idem_csv(const std::string& text) {
  std::vector<IdemRow> rows;
  for (const auto& f : parse_csv(text, 7, kIdemHeader)) {
    IdemRow r;
    r.lambda = parse_double(f[0]);
    r.lambda_prime = parse_double(f[1]);
    r.s_size = std::stol(f[2]);
    r.t = parse_double(f[3]);
    r.estimate.p.value = parse_double(f[4]);
    r.estimate.p.stderror = parse_double(f[5]);
    r.estimate.analytic_lower_bound = parse_double(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string mu_csv(const std::vector<MuRow>& rows, int dimension) {
  std::string out = kMuHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.lambda);
    out += ',';
    out += site_field(r.x, dimension);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += r.estimator;
    out += ',';
    out += format_double(r.estimate.value);
    out += ',';
    out += format_double(r.estimate.stderror);
    out += ',';
    out += std::to_string(r.estimate.accepted);
    out += ',';
    out += std::to_string(r.estimate.replicas);
    out += ',';
    out += format_flags(r.estimate.flags);
    out += '\n';
  }
  return out;
}

std::string goodgrowth_csv(const std::vector<GoodGrowthRow>& rows) {
  std::string out = kGoodGrowthHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.lambda0);
    out += ',';
    out += format_double(r.params.alpha);
    out += ',';
    out += std::to_string(r.params.L);
    out += ',';
    out += std::to_string(r.params.N);
    out += ',';
    out += format_double(r.params.epsilon);
    out += ',';
    out += format_double(r.estimate.value);
    out += ',';
    out += format_double(r.estimate.stderror);
    out += ',';
    out += std::to_string(r.estimate.replicas);
    out += ',';
    out += std::to_string(r.s_size);
    out += ',';
    out += format_double(r.t_box);
    out += ',';
    out += format_double(r.lemma1_budget);
    out += '\n';
  }
  return out;
}

std::string events_csv(const contact::Trajectory& traj, int dimension) {
  std::string out = "time,kind,site,source\n";
  for (const auto& e : traj.events) {
    out += format_double(e.time);
    out += ',';
    out += e.kind == contact::EventKind::recovery ? "recovery" : "infection";
    out += ',';
    out += site_field(e.site, dimension);
    out += ',';
    if (e.kind == contact::EventKind::infection) out += site_field(e.source, dimension);
    out += '\n';
  }
  return out;
}

std::string trajectory_json(const contact::Trajectory& traj, int dimension) {
  nlohmann::json j;
  j["lambda"] = traj.lambda;
  j["horizon"] = traj.horizon;
  j["window_radius"] = traj.window.radius;
  nlohmann::json init = nlohmann::json::array();
  for (const auto& s : traj.initial) init.push_back(site_field(s, dimension));
  j["initial"] = init;
  nlohmann::json fin = nlohmann::json::array();
  for (const auto& s : traj.final_config) fin.push_back(site_field(s, dimension));
  j["final_config"] = fin;
  j["ever_infected"] = traj.first_hit.size();
  if (traj.extinction_time)
    j["extinction_time"] = *traj.extinction_time;
  else
    j["extinction_time"] = nullptr;
  j["boundary_hit"] = traj.boundary_hit;
  j["events_recorded"] = traj.events.size();
  return j.dump(2) + "\n";
}

std::string oracle_json(const contact::OracleReport& report, double lambda, double oracle_lambda,
                        double t) {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["oracle_lambda"] = oracle_lambda;
  j["t"] = t;
  j["valid"] = report.valid;
  j["replicas"] = report.replicas;
  j["statistic"] = report.statistic;
  j["df"] = report.df;
  j["bins"] = report.bins;
  j["p_value"] = report.p_value;
  j["alpha_level"] = report.alpha_level;
  j["pass"] = report.pass;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// svg

namespace {

struct Canvas {
  double width = 640, height = 440, margin = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27845c", "#8e44ad", "#b9770e", "#34495e"};

}  // namespace

std::string scan_svg(const ScanTable& table, int dimension) {
  Canvas c;
  c.x0 = table.rows.front().lambda;
  c.x1 = table.rows.back().lambda;
  if (c.x0 == c.x1) {
    c.x0 -= 0.5;
    c.x1 += 0.5;
  }
  c.y0 = 0.0;
  c.y1 = 1e-9;
  for (const auto& row : table.rows)
    for (const auto& e : row.mu)
      if (e.valid()) c.y1 = std::max(c.y1, e.value + 3 * e.stderror);
  c.y1 *= 1.05;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width << "\" height=\""
    << c.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << c.px(c.x0) << "\" y1=\"" << c.py(0) << "\" x2=\"" << c.px(c.x1)
    << "\" y2=\"" << c.py(0) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << c.px(c.x0) << "\" y1=\"" << c.py(c.y0) << "\" x2=\"" << c.px(c.x0)
    << "\" y2=\"" << c.py(c.y1) << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << c.width / 2 << "\" y=\"" << c.height - 12
    << "\" font-size=\"13\" text-anchor=\"middle\">lambda</text>\n";
  s << "<text x=\"14\" y=\"" << c.height / 2
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << c.height / 2
    << ")\">mu_hat</text>\n";
  for (size_t j = 0; j < table.directions.size(); ++j) {
    const char* color = kPalette[j % 6];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : table.rows) {
      const Estimate& e = row.mu[j];
      if (!e.valid()) continue;
      s << c.px(row.lambda) << "," << c.py(e.value) << " ";
    }
    s << "\"/>\n";
    for (const auto& row : table.rows) {
      const Estimate& e = row.mu[j];
      if (!e.valid()) continue;
      s << "<circle cx=\"" << c.px(row.lambda) << "\" cy=\"" << c.py(e.value)
        << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      s << "<line x1=\"" << c.px(row.lambda) << "\" y1=\"" << c.py(e.value - e.stderror)
        << "\" x2=\"" << c.px(row.lambda) << "\" y2=\"" << c.py(e.value + e.stderror)
        << "\" stroke=\"" << color << "\"/>\n";
    }
    s << "<text x=\"" << c.width - c.margin + 4 << "\" y=\"" << c.margin + 16.0 * j
      << "\" font-size=\"12\" fill=\"" << color << "\">x=" << table.directions[j].to_string(dimension)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string shape_svg(const std::vector<ShapeEstimate>& shapes) {
  Canvas c;
  c.width = 520;
  c.height = 520;
  double r = 1e-9;
  for (const auto& s : shapes)
    for (double x : s.radii)
      if (!std::isnan(x)) r = std::max(r, x);
  c.x0 = -1.1 * r;
  c.x1 = 1.1 * r;
  c.y0 = -1.1 * r;
  c.y1 = 1.1 * r;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width << "\" height=\""
    << c.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << c.px(c.x0) << "\" y1=\"" << c.py(0) << "\" x2=\"" << c.px(c.x1)
    << "\" y2=\"" << c.py(0) << "\" stroke=\"#ccc\"/>\n";
  s << "<line x1=\"" << c.px(0) << "\" y1=\"" << c.py(c.y0) << "\" x2=\"" << c.px(0) << "\" y2=\""
    << c.py(c.y1) << "\" stroke=\"#ccc\"/>\n";
  for (size_t i = 0; i < shapes.size(); ++i) {
    const ShapeEstimate& sh = shapes[i];
    const char* color = kPalette[i % 6];
    // order outline vertices by angle and close the polyline
    std::vector<std::pair<double, std::pair<double, double>>> pts;
    for (size_t j = 0; j < sh.directions.size(); ++j) {
      double x = sh.directions[j][0] * sh.radii[j];
      double y = sh.directions[j].size() > 1 ? sh.directions[j][1] * sh.radii[j] : 0.0;
      pts.push_back({std::atan2(y, x), {x, y}});
    }
    std::sort(pts.begin(), pts.end());
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [ang, p] : pts) s << c.px(p.first) << "," << c.py(p.second) << " ";
    s << c.px(pts.front().second.first) << "," << c.py(pts.front().second.second);
    s << "\"/>\n";
    s << "<text x=\"" << c.margin << "\" y=\"" << c.margin + 16.0 * i << "\" font-size=\"12\" fill=\""
      << color << "\">lambda=" << format_double(sh.lambda) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace contactcli
