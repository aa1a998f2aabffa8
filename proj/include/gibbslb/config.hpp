#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/weights.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gibbslb {

// Default tolerance per check; `tol.<check>` keys and --tol override.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"spectrum_residual", 1e-10},
      {"alpha_skew", 1e-12},
      {"alpha_psd", 1e-12},
      {"alpha_routes", 1e-8},
      {"trace_preservation", 1e-10},
      {"cptp", 1e-8},
      {"kms_db", 1e-10},
      {"stationarity", 1e-10},
      {"q_residual", 1e-10},
      {"coherent_routes", 1e-12},
      {"transition_routes", 1e-12},
      {"sdb", 1e-10},
      {"sdb_falsification", 1e-2},
      {"parent_hermitian", 1e-10},
      {"parent_top_eigenvalue", 1e-8},
      {"frustration", 1e-10},
      {"parent_spectrum", 1e-8},
      {"parent_conjugation", 1e-10},
      {"mixing_bound", 1.0},
      {"evolve_trace", 1e-10},
      {"evolve_hermitian", 1e-10},
      {"td_B", 1e-4},
      {"td_N", 1e-4},
      {"td_transition", 1e-4},
      {"td_convergence", 3.5},
      {"td_metropolis_eta", 1.0},
      {"oft", 1e-8},
      {"filter_norm", 1e-10},
      {"l1_b2", 1e-6},
      {"l1_n1", 1e-6},
      {"l1_b1", 1.0},
      {"l1_h_plus_metropolis", 1e-4},
      {"functional_equation", 1e-12},
  };
  return t;
}

inline const std::vector<std::string>& default_verify_checks() {
  static const std::vector<std::string> c = {
      "spectrum_residual", "alpha_skew",      "alpha_psd",       "alpha_routes",
      "trace_preservation", "cptp",          "kms_db",          "stationarity",
      "q_residual",        "coherent_routes", "transition_routes", "sdb",
      "parent_hermitian",  "parent_top_eigenvalue", "frustration", "parent_spectrum",
      "parent_conjugation", "mixing_bound",
  };
  return c;
}

struct GridOverrides {
  std::optional<double> tau0, T, T_inner;
};

struct ExperimentConfig {
  std::string model;
  double beta = 1.0;
  WeightKind weight = WeightKind::Gaussian;
  std::optional<double> sigma_e, omega_gamma, sigma_gamma;
  double s = 10.0;
  std::uint64_t seed = 1;
  std::vector<std::string> checks;
  bool checks_given = false;
  std::string output;
  std::string format = "json";
  GridOverrides grid;
  double eta = 1e-3;
  std::vector<double> sdb_s = {0.5};
  std::string initial = "random";
  std::vector<double> times = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> betas;
  std::map<std::string, double> tol;

  double tolerance(const std::string& check) const {
    if (auto it = tol.find(check); it != tol.end()) return it->second;
    if (auto it = default_tolerances().find(check); it != default_tolerances().end()) return it->second;
    throw InputError("no tolerance defined for check '" + check + "'");
  }

  WeightSpec weight_spec(double b) const {
    const double se = sigma_e.value_or(b > 0 ? 1.0 / b : 1.0);
    switch (weight) {
      case WeightKind::Gaussian: {
        if (b == 0.0) return gaussian_weight_infinite_temperature(se, sigma_gamma.value_or(1.0));
        return gaussian_weight(b, se, omega_gamma.value_or(1.0 / b));
      }
      case WeightKind::Metropolis: return metropolis_weight(b, se);
      case WeightKind::FiniteS: return finite_s_weight(b, se, s);
      case WeightKind::GlauberSmooth: return glauber_smooth_weight(b, se);
      case WeightKind::GeneralG: throw InputError("weight general_g is not configurable from a config file");
    }
    throw InternalError("unhandled weight kind");
  }
};

inline double parse_real(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "': bad number '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(x)) throw InputError("config key '" + key + "': bad number '" + v + "'");
  return x;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& t : split_list(v)) out.push_back(parse_real(t, key));
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& val) {
  if (key == "model") {
    c.model = val;
  } else if (key == "beta") {
    c.beta = parse_real(val, key);
  } else if (key == "weight") {
    c.weight = parse_weight_kind(val);
  } else if (key == "sigma_e") {
    c.sigma_e = parse_real(val, key);
  } else if (key == "omega_gamma") {
    c.omega_gamma = parse_real(val, key);
  } else if (key == "sigma_gamma") {
    c.sigma_gamma = parse_real(val, key);
  } else if (key == "s") {
    c.s = parse_real(val, key);
  } else if (key == "seed") {
    try {
      std::size_t pos = 0;
      c.seed = std::stoull(val, &pos);
      if (pos != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw InputError("config key 'seed': bad integer '" + val + "'");
    }
  } else if (key == "checks") {
    c.checks = split_list(val);
    c.checks_given = true;
  } else if (key == "output") {
    c.output = val;
  } else if (key == "format") {
    c.format = val;
  } else if (key == "grid.tau0") {
    c.grid.tau0 = parse_real(val, key);
  } else if (key == "grid.T") {
    c.grid.T = parse_real(val, key);
  } else if (key == "grid.T_inner") {
    c.grid.T_inner = parse_real(val, key);
  } else if (key == "eta") {
    c.eta = parse_real(val, key);
  } else if (key == "sdb_s") {
    c.sdb_s = parse_real_list(val, key);
  } else if (key == "initial") {
    c.initial = val;
  } else if (key == "times") {
    c.times = parse_real_list(val, key);
  } else if (key == "betas") {
    c.betas = parse_real_list(val, key);
  } else if (key.rfind("tol.", 0) == 0) {
    c.tol[key.substr(4)] = parse_real(val, key);
  } else {
    throw InputError("unknown config key '" + key + "'");
  }
}

inline void validate(const ExperimentConfig& c) {
  if (c.model.empty()) throw InputError("config: 'model' is required");
  if (!std::filesystem::exists(c.model)) throw InputError("config: model file '" + c.model + "' does not exist");
  if (!(c.beta >= 0.0)) throw InputError("config: beta must be >= 0");
  for (double b : c.betas)
    if (!(b >= 0.0)) throw InputError("config: betas must be >= 0");
  if (c.checks_given && c.checks.empty()) throw InputError("config: 'checks' must not be empty");
  if (c.format != "json" && c.format != "csv") throw InputError("config: format must be json or csv");
  for (const auto& [k, v] : c.tol) {
    if (!default_tolerances().count(k)) throw InputError("config: unknown check '" + k + "' in tolerance override");
    if (!(v >= 0.0)) throw InputError("config: tolerance for '" + k + "' must be >= 0");
  }
  for (const auto& k : c.checks)
    if (!default_tolerances().count(k)) throw InputError("config: unknown check '" + k + "'");
  for (double s : c.sdb_s)
    if (s < 0.0 || s > 1.0) throw InputError("config: sdb_s values must lie in [0, 1]");
  if (!(c.eta > 0.0)) throw InputError("config: eta must be positive");
}

// Flat key = value lines; '#' starts a comment. Relative model paths are
// resolved against the config file's directory.
inline ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = "", const std::string& name = "config") {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError(name + ":" + std::to_string(lineno) + ": empty key");
    set_key(c, key, val);
  }
  if (!c.model.empty() && !base_dir.empty() && std::filesystem::path(c.model).is_relative())
    c.model = (std::filesystem::path(base_dir) / c.model).lexically_normal().string();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path().string(), path);
}

}  // namespace gibbslb
