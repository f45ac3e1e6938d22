#include "wolbopt/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wolbopt/errors.hpp"

namespace wolbopt {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string header_line(const std::string& config_hash) {
  return std::string("# wolbopt ") + kToolVersion + " config_hash=" + config_hash + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
  if (!os) throw InputError("failed writing " + path.string());
}

std::string trajectory_csv(const Grid1D& grid, const Trajectory& traj,
                           const std::vector<std::size_t>& steps, const std::string& header) {
  std::ostringstream os;
  os << header << "x";
  for (std::size_t k : steps) os << "," << "t" << format_number(traj.times.at(k));
  os << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_number(grid.x(i));
    for (std::size_t k : steps) os << "," << format_number(traj.fields.at(k)[i]);
    os << "\n";
  }
  return os.str();
}

std::string spectral_csv(const SpectralReport& report, const std::string& header) {
  std::ostringstream os;
  os << header << "n,lambda_n,delta_n\n";
  for (const auto& m : report.modes)
    os << m.n << "," << format_number(m.lambda) << "," << format_number(m.delta) << "\n";
  os << "K_T,," << format_number(report.K_T) << "\n";
  return os.str();
}

std::string subsolution_sweep_csv(const std::vector<SubsolutionReport>& rows,
                                  const std::string& header) {
  std::ostringstream os;
  os << header << "alpha,R_alpha,C_alpha\n";
  for (const auto& r : rows)
    os << format_number(r.alpha) << "," << format_number(r.R_alpha) << ","
       << format_number(r.C_alpha) << "\n";
  return os.str();
}

std::string profile_csv(const Grid1D& grid, const SpatialField& values, const std::string& column,
                        const std::string& header) {
  std::ostringstream os;
  os << header << "x," << column << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << format_number(grid.x(i)) << "," << format_number(values.at(i)) << "\n";
  return os.str();
}

std::string history_csv(const std::vector<HistoryEntry>& history, const std::string& header) {
  std::ostringstream os;
  os << header << "iteration,J,residual\n";
  for (const auto& h : history)
    os << h.iteration << "," << format_number(h.J) << "," << format_number(h.residual) << "\n";
  return os.str();
}

std::string summary_json(const OptimResult& r, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash;
  j["method"] = r.method;
  j["init_label"] = r.init_label;
  j["J"] = r.J_value;
  j["lambda"] = r.lambda;
  j["residual"] = r.residual;
  j["slackness"] = r.slackness;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j.dump(2) + "\n";
}

std::string asymptotics_csv(const std::vector<AsymptoticRow>& rows, const std::string& header) {
  std::ostringstream os;
  os << header << "epsilon,p_error_L2,J_error,J_eps,J_limit,substeps,floored\n";
  for (const auto& r : rows)
    os << format_number(r.epsilon) << "," << format_number(r.p_error_L2) << ","
       << format_number(r.J_error) << "," << format_number(r.J_eps) << ","
       << format_number(r.J_limit) << "," << r.substeps << "," << r.floored_values << "\n";
  return os.str();
}

namespace {

bool parse_double(std::string s, double& out) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  s = s.substr(b, e - b + 1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SpatialField read_profile_csv(const std::filesystem::path& path, const Grid1D& grid) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read profile CSV " + path.string());
  SpatialField values;
  std::string line;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.empty() || cells.size() > 2)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected 1 or 2 columns");
    double v = 0.0;
    if (!parse_double(cells.back(), v)) {
      if (!seen_data && values.empty()) continue;
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
    seen_data = true;
    values.push_back(v);
  }
  if (values.size() != grid.size())
    throw InputError("profile CSV " + path.string() + " has " + std::to_string(values.size()) +
                     " values, grid has " + std::to_string(grid.size()) + " nodes");
  return values;
}

}  // namespace wolbopt
