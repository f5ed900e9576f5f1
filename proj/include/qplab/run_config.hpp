#ifndef QPLAB_RUN_CONFIG_HPP
#define QPLAB_RUN_CONFIG_HPP

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qplab/verify.hpp"

namespace qplab {

/// Fully resolved run configuration. Precedence: command-line flag over
/// config file (QPLAB_CONFIG) over built-in default.
struct RunConfig {
  std::optional<std::string> group;  // sl2r | sl<n>r | su2; unset = all
  std::optional<std::string> sigma;  // id | adH; unset = both
  double form_scale = 1.0;
  std::uint64_t seed = 42;
  std::optional<double> tol;
  std::string grid = "20x20x5";
  int steps = 10000;
  double step_size = 1e-3;
  std::string format = "json";  // json | csv
  std::string out;              // empty = stdout
};

/// Parses "0.75", "pi", "pi/2", "2pi", "-pi/3", "2*pi/3", "0.5pi".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty angle");

  const std::size_t at = s.find("pi");
  if (at == std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad angle: " + text);
    return v;
  }

  std::string pre = s.substr(0, at);
  std::string post = s.substr(at + 2);
  double coef = 1.0;
  if (!pre.empty() && pre.back() == '*') pre.pop_back();
  if (pre == "-") {
    coef = -1.0;
  } else if (pre == "+" || pre.empty()) {
    coef = 1.0;
  } else {
    std::size_t used = 0;
    coef = std::stod(pre, &used);
    if (used != pre.size()) throw std::invalid_argument("bad angle: " + text);
  }
  double div = 1.0;
  if (!post.empty()) {
    if (post.front() != '/') throw std::invalid_argument("bad angle: " + text);
    std::size_t used = 0;
    div = std::stod(post.substr(1), &used);
    if (used != post.size() - 1 || div == 0.0)
      throw std::invalid_argument("bad angle: " + text);
  }
  return coef * kPi / div;
}

/// "tau,theta,rho" with pi-expressions allowed in each slot.
inline ChartPoint parse_chart_point(const std::string& text) {
  std::istringstream is(text);
  std::string part;
  double vals[3];
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(is, part, ',')) throw std::invalid_argument("expected tau,theta,rho");
    vals[i] = parse_angle(part);
  }
  if (std::getline(is, part, ',')) throw std::invalid_argument("expected exactly three coordinates");
  return ChartPoint{vals[0], vals[1], vals[2]};
}

/// "NTxNTHxNR", e.g. "20x20x5".
inline void parse_grid_spec(const std::string& text, BtzConfig& bc) {
  int vals[3];
  std::istringstream is(text);
  std::string part;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(is, part, 'x')) throw std::invalid_argument("grid must be NxNxN");
    vals[i] = std::stoi(part);
    if (vals[i] < 1) throw std::invalid_argument("grid sizes must be positive");
  }
  bc.grid_tau = vals[0];
  bc.grid_theta = vals[1];
  bc.grid_rho = vals[2];
}

/// Path of the JSON config file: $QPLAB_CONFIG, or ./qplab_config.json for
/// writes when the variable is unset.
inline std::string config_file_path() {
  if (const char* env = std::getenv("QPLAB_CONFIG")) return env;
  return "qplab_config.json";
}

/// Overlays values found in the config file (if it exists) onto `cfg`.
inline void load_config_file(RunConfig& cfg) {
  std::ifstream in(config_file_path());
  if (!in.good()) return;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config file parse error: ") + e.what());
  }
  if (j.contains("group")) cfg.group = j["group"].get<std::string>();
  if (j.contains("sigma")) cfg.sigma = j["sigma"].get<std::string>();
  if (j.contains("form_scale")) cfg.form_scale = j["form_scale"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("grid")) cfg.grid = j["grid"].get<std::string>();
  if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
  if (j.contains("step_size")) cfg.step_size = j["step_size"].get<double>();
  if (j.contains("format")) cfg.format = j["format"].get<std::string>();
}

/// Persists the calibrated form scale, merging with any existing file.
inline void write_form_scale(double form_scale) {
  nlohmann::json j = nlohmann::json::object();
  {
    std::ifstream in(config_file_path());
    if (in.good()) {
      try {
        in >> j;
      } catch (const nlohmann::json::exception&) {
        j = nlohmann::json::object();
      }
    }
  }
  j["form_scale"] = form_scale;
  std::ofstream out(config_file_path(), std::ios::trunc);
  if (!out.good())
    throw std::runtime_error("cannot write config file: " + config_file_path());
  out << j.dump(2) << "\n";
}

inline SuiteConfig to_suite_config(const RunConfig& cfg) {
  SuiteConfig sc;
  sc.seed = cfg.seed;
  sc.tol_override = cfg.tol;
  sc.group = cfg.group;
  sc.sigma = cfg.sigma;
  sc.form_scale = cfg.form_scale;
  parse_grid_spec(cfg.grid, sc.btz);
  sc.btz.form_scale = cfg.form_scale;
  sc.btz.steps = cfg.steps;
  sc.btz.step_size = cfg.step_size;
  return sc;
}

}  // namespace qplab

#endif
