#pragma once

#include "gibbslb/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace gibbslb {

using json = nlohmann::json;

// Comparison of value against tolerance: le (residuals), lt, ge, or gt
// (falsification checks, where a large residual is the expected outcome).
struct CheckRecord {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::string comparison = "le";
  bool pass = false;
  std::string stage;
  std::string error;
  double grid_t0 = std::numeric_limits<double>::quiet_NaN();
  double grid_T = std::numeric_limits<double>::quiet_NaN();

  void decide() {
    if (!error.empty() || std::isnan(value)) {
      pass = false;
      return;
    }
    if (comparison == "gt") pass = value > tolerance;
    else if (comparison == "ge") pass = value >= tolerance;
    else if (comparison == "lt") pass = value < tolerance;
    else pass = value <= tolerance;
  }
};

struct Report {
  std::string command;
  std::vector<CheckRecord> checks;
  json env = json::object();
  json data = json::object();
  json timings = json::object();

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const Report& r) {
  json j;
  j["command"] = r.command;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    json e = {{"name", c.name},
              {"value", number_or_null(c.value)},
              {"tolerance", c.tolerance},
              {"comparison", c.comparison},
              {"pass", c.pass},
              {"stage", c.stage}};
    if (!c.error.empty()) e["error"] = c.error;
    if (std::isfinite(c.grid_t0)) e["grid_t0"] = c.grid_t0;
    if (std::isfinite(c.grid_T)) e["grid_T"] = c.grid_T;
    j["checks"].push_back(std::move(e));
  }
  j["env"] = r.env;
  j["data"] = r.data;
  j["timings"] = r.timings;
  return j;
}

inline std::string format_g17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string to_csv(const Report& r) {
  std::string s = "check,value,tolerance,pass\n";
  for (const auto& c : r.checks)
    s += c.name + "," + format_g17(c.value) + "," + format_g17(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
  return s;
}

inline void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write output file '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void emit(const Report& r, const std::string& format, const std::string& path) {
  if (format == "json") write_text(to_json(r).dump(2) + "\n", path);
  else if (format == "csv") write_text(to_csv(r), path);
  else throw InputError("unknown output format '" + format + "'");
}

}  // namespace gibbslb
