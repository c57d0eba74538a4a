#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "conjmatch/errors.hpp"
#include "conjmatch/product_graph.hpp"
#include "conjmatch/robust_loss.hpp"

namespace conjmatch {

enum class SolveMode { Cyclic, Open };

inline SolveMode parseMode(const std::string& s) {
  if (s == "cyclic") return SolveMode::Cyclic;
  if (s == "open") return SolveMode::Open;
  throw ParseError("unknown mode: " + s);
}

inline const char* modeName(SolveMode m) { return m == SolveMode::Cyclic ? "cyclic" : "open"; }

struct Config {
  RobustLossParams psi1 = defaultDataLoss();
  RobustLossParams psi2 = defaultRigidityLoss();
  PruneOptions prune;
  SolveMode mode = SolveMode::Cyclic;
  bool normalize = true;  // rescale both shapes to unit geodesic diameter
  int anchor_count = 12;
  int threads = 0;  // 0 = auto
  unsigned long seed = 0;
  int verbosity = 0;
};

namespace detail {

inline std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool parseBool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParseError("config key " + key + ": expected boolean, got '" + v + "'");
}

inline double parseReal(const std::string& v, const std::string& key) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("config key " + key + ": expected number, got '" + v + "'");
  }
}

}  // namespace detail

/// TOML-style sections of key = value lines; '#' starts a comment. Unknown
/// keys are errors so typos never silently fall back to defaults.
inline Config parseConfig(std::istream& in, Config base = {}) {
  Config cfg = base;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trimmed(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("config line " + std::to_string(lineno) + ": bad section header");
      section = detail::trimmed(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + detail::trimmed(line.substr(0, eq));
    const std::string value = detail::trimmed(line.substr(eq + 1));

    if (key == "data_loss.alpha") cfg.psi1.alpha = detail::parseReal(value, key);
    else if (key == "data_loss.c") cfg.psi1.c = detail::parseReal(value, key);
    else if (key == "data_loss.bowl") cfg.psi1.bowl = parseBowl(value);
    else if (key == "rigidity_loss.alpha") cfg.psi2.alpha = detail::parseReal(value, key);
    else if (key == "rigidity_loss.c") cfg.psi2.c = detail::parseReal(value, key);
    else if (key == "rigidity_loss.bowl") cfg.psi2.bowl = parseBowl(value);
    else if (key == "prune.turning_points") cfg.prune.turning_points = detail::parseBool(value, key);
    else if (key == "prune.degenerate_pairs") cfg.prune.degenerate_pairs = detail::parseBool(value, key);
    else if (key == "prune.mesh_hold_all_incident") cfg.prune.mesh_hold_all_incident = detail::parseBool(value, key);
    else if (key == "solver.mode") cfg.mode = parseMode(value);
    else if (key == "pipeline.normalize") cfg.normalize = detail::parseBool(value, key);
    else if (key == "transfer.anchor_count") cfg.anchor_count = static_cast<int>(detail::parseReal(value, key));
    else if (key == "run.threads") cfg.threads = static_cast<int>(detail::parseReal(value, key));
    else if (key == "run.seed") cfg.seed = static_cast<unsigned long>(detail::parseReal(value, key));
    else if (key == "run.verbosity") cfg.verbosity = static_cast<int>(detail::parseReal(value, key));
    else throw ParseError("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
  if (cfg.psi1.c <= 0.0 || cfg.psi2.c <= 0.0) throw ParseError("loss scale c must be positive");
  if (cfg.anchor_count <= 0) throw ParseError("anchor_count must be positive");
  if (cfg.threads < 0) throw ParseError("threads must be nonnegative");
  return cfg;
}

inline Config loadConfig(const std::string& path, Config base = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  return parseConfig(in, base);
}

}  // namespace conjmatch
