#include "wolbopt/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "wolbopt/errors.hpp"
#include "wolbopt/io.hpp"

namespace wolbopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError("field " + key + ": expected a finite number, got '" + raw + "'");
  return v;
}

int to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("field " + key + ": expected an integer, got '" + raw + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError("field " + key + ": expected true or false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw InputError("field " + key + ": expected a comma-separated list");
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

struct Key {
  std::string name;  // section.key
  bool required;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define NUM_KEY(NAME, REQ, FIELD)                                                               \
  Key {                                                                                         \
    NAME, REQ, [](ExperimentConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
        [](const ExperimentConfig& c) { return format_number(c.FIELD); }                        \
  }
#define INT_KEY(NAME, REQ, FIELD)                                                            \
  Key {                                                                                      \
    NAME, REQ, [](ExperimentConfig& c, const std::string& v) { c.FIELD = to_int(NAME, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                    \
  }
#define LIST_KEY(NAME, FIELD)                                                                     \
  Key {                                                                                           \
    NAME, false, [](ExperimentConfig& c, const std::string& v) { c.FIELD = to_list(NAME, v); }, \
        [](const ExperimentConfig& c) { return list_str(c.FIELD); }                               \
  }
#define STR_KEY(NAME, FIELD)                                                                  \
  Key {                                                                                       \
    NAME, false, [](ExperimentConfig& c, const std::string& v) { c.FIELD = trim(v); },        \
        [](const ExperimentConfig& c) { return c.FIELD; }                                     \
  }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      NUM_KEY("model.s_f", true, params.s_f),
      NUM_KEY("model.s_h", true, params.s_h),
      NUM_KEY("model.delta", true, params.delta),
      NUM_KEY("model.d_un", true, params.d_un),
      NUM_KEY("model.F_un", true, params.F_un),
      NUM_KEY("model.K", true, params.K),
      NUM_KEY("model.D", true, params.D),
      NUM_KEY("grid.L", true, L),
      INT_KEY("grid.nx", true, nx),
      Key{"grid.layout", false,
          [](ExperimentConfig& c, const std::string& v) { c.layout = parse_layout(trim(v)); },
          [](const ExperimentConfig& c) { return layout_name(c.layout); }},
      NUM_KEY("time.T", true, T),
      INT_KEY("time.nt", true, nt),
      NUM_KEY("budget.C", false, budget.C),
      NUM_KEY("budget.M", false, budget.M),
      STR_KEY("simulate.release", simulate.release),
      LIST_KEY("simulate.snapshots", simulate.snapshots),
      STR_KEY("optimize.method", optimize.method),
      NUM_KEY("optimize.tau0", false, optimize.options.tau0),
      NUM_KEY("optimize.rho", false, optimize.options.rho),
      NUM_KEY("optimize.rho_max", false, optimize.options.rho_max),
      INT_KEY("optimize.max_iter", false, optimize.options.max_iter),
      NUM_KEY("optimize.tol", false, optimize.options.tol),
      Key{"optimize.parallel", false,
          [](ExperimentConfig& c, const std::string& v) {
            c.optimize.parallel = to_bool("optimize.parallel", v);
          },
          [](const ExperimentConfig& c) { return std::string(c.optimize.parallel ? "true" : "false"); }},
      Key{"table3.multistart_layout", false,
          [](ExperimentConfig& c, const std::string& v) {
            c.table3.multistart_layout = parse_layout(trim(v));
          },
          [](const ExperimentConfig& c) { return layout_name(c.table3.multistart_layout); }},
      LIST_KEY("asymptotics.eps", asymptotics.eps),
      Key{"asymptotics.init", false,
          [](ExperimentConfig& c, const std::string& v) {
            const auto s = trim(v);
            if (s == "well_prepared") c.asymptotics.init = AsymptoticInit::well_prepared;
            else if (s == "wolbachia_free") c.asymptotics.init = AsymptoticInit::wolbachia_free;
            else throw InputError("field asymptotics.init: expected well_prepared or wolbachia_free");
          },
          [](const ExperimentConfig& c) {
            return std::string(c.asymptotics.init == AsymptoticInit::well_prepared ? "well_prepared"
                                                                                   : "wolbachia_free");
          }},
      NUM_KEY("asymptotics.control_amplitude", false, asymptotics.control_amplitude),
      NUM_KEY("asymptotics.control_center", false, asymptotics.control_center),
      NUM_KEY("asymptotics.control_width", false, asymptotics.control_width),
      NUM_KEY("asymptotics.init_amplitude", false, asymptotics.init_amplitude),
      NUM_KEY("asymptotics.init_center", false, asymptotics.init_center),
      NUM_KEY("asymptotics.init_width", false, asymptotics.init_width),
      NUM_KEY("analyze.level", false, analyze.level),
      INT_KEY("analyze.modes", false, analyze.modes),
      STR_KEY("analyze.spectral", analyze.spectral),
      NUM_KEY("analyze.alpha", false, analyze.alpha),
      NUM_KEY("analyze.center", false, analyze.center),
      LIST_KEY("analyze.alpha_sweep", analyze.alpha_sweep),
  };
  return keys;
}

#undef NUM_KEY
#undef INT_KEY
#undef LIST_KEY
#undef STR_KEY

const Key* find_key(const std::string& name) {
  for (const auto& k : registry())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

void check_config(const ExperimentConfig& c) {
  if (c.nx < 2) throw InputError("field grid.nx: must be >= 2");
  if (!(c.L > 0.0)) throw InputError("field grid.L: must be positive");
  if (c.nt < 1) throw InputError("field time.nt: must be >= 1");
  if (!(c.T > 0.0)) throw InputError("field time.T: must be positive");
  if (!(c.budget.C > 0.0)) throw InputError("field budget.C: must be positive");
  if (!(c.budget.M > 0.0)) throw InputError("field budget.M: must be positive");
  const auto& m = c.optimize.method;
  if (m != "uzawa" && m != "multistart" && m != "both")
    throw InputError("field optimize.method: expected uzawa, multistart or both");
  if (c.optimize.options.max_iter < 1) throw InputError("field optimize.max_iter: must be >= 1");
  if (!(c.optimize.options.tol > 0.0)) throw InputError("field optimize.tol: must be positive");
  if (c.analyze.modes < 1) throw InputError("field analyze.modes: must be >= 1");
  if (c.analyze.spectral != "continuous" && c.analyze.spectral != "discrete")
    throw InputError("field analyze.spectral: expected continuous or discrete");
  for (double e : c.asymptotics.eps)
    if (!(e > 0.0)) throw InputError("field asymptotics.eps: values must be positive");
  for (std::size_t i = 1; i < c.asymptotics.eps.size(); ++i)
    if (!(c.asymptotics.eps[i] < c.asymptotics.eps[i - 1]))
      throw InputError("field asymptotics.eps: values must be strictly decreasing");
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& k : registry()) out += k.name + " = " + k.get(*this) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw InputError("override '" + assignment + "' must have the form section.key=value");
  const std::string name = trim(assignment.substr(0, eq));
  const Key* k = find_key(name);
  if (!k) throw InputError("override names unknown key '" + name + "'");
  k->set(cfg, assignment.substr(eq + 1));
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::vector<std::string>& overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig cfg = default_config();
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw InputError(origin + ": key '" + section + "' appears outside a [section]");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const Key* k = find_key(name);
      if (!k) throw InputError(origin + ": unknown key '" + key + "' in [" + section + "]");
      k->set(cfg, value.data());
      seen.insert(name);
    }
  }
  for (const auto& k : registry())
    if (k.required && !seen.count(k.name)) {
      const auto dot = k.name.find('.');
      throw InputError(origin + ": missing field " + k.name.substr(dot + 1) + " in [" +
                       k.name.substr(0, dot) + "]");
    }
  for (const auto& o : overrides) apply_override(cfg, o);
  check_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string(), overrides);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.push_back(k.name + (k.required ? " (required)" : ""));
  return out;
}

}  // namespace wolbopt
