#include "schr/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

namespace schr {

namespace {

using nlohmann::json;

cplx parse_complex(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(what + ": expected a number or [re, im]");
}

CVector parse_vector(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array");
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = parse_complex(v[i], what);
  return out;
}

CMatrix parse_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + ": expected a non-empty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array()) throw ConfigError(what + ": rows must be arrays");
  const std::size_t cols = v[0].size();
  CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw ConfigError(what + ": ragged matrix");
    for (std::size_t k = 0; k < cols; ++k)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_complex(v[i][k], what);
  }
  return out;
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("system: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

DynamicalSystem from_generator(const json& j) {
  const std::string name = j.at("builtin").get<std::string>();
  const double T = number(j, "T", 1.0);
  CMatrix a;
  if (name == "diag") {
    check_keys(j, {"builtin", "values", "b", "u0", "T"}, "system diag");
    if (!j.contains("values")) throw ConfigError("system diag: 'values' is required");
    a = diag_matrix(j.at("values").get<std::vector<double>>());
  } else if (name == "convection-diffusion-1d") {
    check_keys(j, {"builtin", "n", "velocity", "diffusion", "length", "b", "u0", "T"}, "system convection-diffusion-1d");
    const int n = j.value("n", 16);
    a = convection_diffusion_1d(n, number(j, "velocity", 1.0), number(j, "diffusion", 0.1), number(j, "length", 1.0));
  } else {
    check_keys(j, {"builtin"}, "system " + name);
    return builtin_system(name);
  }
  const Eigen::Index n = a.rows();
  CVector b = j.contains("b") ? parse_vector(j.at("b"), "b") : CVector::Zero(n);
  CVector u0(n);
  if (j.contains("u0")) {
    u0 = parse_vector(j.at("u0"), "u0");
  } else if (name == "convection-diffusion-1d") {
    // sin(pi x) on the interior nodes
    const double length = number(j, "length", 1.0);
    const double h = length / static_cast<double>(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) u0(i) = std::sin(std::numbers::pi * (i + 1) * h / length);
  } else {
    u0.setOnes();
  }
  if (b.size() != n || u0.size() != n) throw ConfigError("system " + name + ": b and u0 must have dimension " +
                                                          std::to_string(n));
  return DynamicalSystem(a, b, u0, T);
}

}  // namespace

DynamicalSystem system_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("system: expected an object");
  if (j.contains("builtin")) return from_generator(j);
  check_keys(j, {"dim", "A", "b", "u0", "T", "time_dependent", "A1", "b1", "omega"}, "system");
  for (const char* key : {"A", "u0", "T"})
    if (!j.contains(key)) throw ConfigError(std::string("system: '") + key + "' is required");
  const CMatrix a = parse_matrix(j.at("A"), "A");
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ConfigError("system: A must be square");
  if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != n)
    throw ConfigError("system: dim does not match A");
  const CVector b = j.contains("b") ? parse_vector(j.at("b"), "b") : CVector::Zero(n);
  const CVector u0 = parse_vector(j.at("u0"), "u0");
  if (b.size() != n || u0.size() != n) throw ConfigError("system: b and u0 must have dimension " + std::to_string(n));
  const double T = number(j, "T", 1.0);

  const bool modulated = j.contains("A1") || j.contains("b1");
  const bool td = j.value("time_dependent", modulated);
  if (modulated && !td) throw ConfigError("system: A1/b1 given but time_dependent is false");
  if (!modulated) {
    if (td) {
      return DynamicalSystem([a](double) { return a; }, [b](double) { return b; }, u0, T, true);
    }
    return DynamicalSystem(a, b, u0, T);
  }
  const CMatrix a1 = j.contains("A1") ? parse_matrix(j.at("A1"), "A1") : CMatrix::Zero(n, n);
  const CVector b1 = j.contains("b1") ? parse_vector(j.at("b1"), "b1") : CVector::Zero(n);
  if (a1.rows() != n || a1.cols() != n || b1.size() != n) throw ConfigError("system: A1/b1 dimension mismatch");
  const double omega = number(j, "omega", 1.0);
  return DynamicalSystem([a, a1, omega](double t) -> CMatrix { return a + std::sin(omega * t) * a1; },
                         [b, b1, omega](double t) -> CVector { return b + std::sin(omega * t) * b1; }, u0, T, true);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

DynamicalSystem resolve_system(const std::string& name_or_path) {
  for (const auto& name : builtin_system_names())
    if (name == name_or_path) return builtin_system(name);
  if (std::filesystem::exists(name_or_path)) return system_from_json(read_json_file(name_or_path));
  throw ConfigError("unknown system '" + name_or_path + "' (not a builtin and no such file)");
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object at the top level");
  check_keys(j, {"system", "psi", "eps", "L", "R", "np", "lift", "average", "output", "threads", "seed"}, "config");
  RunConfig c;
  try {
    if (j.contains("system")) {
      if (j.at("system").is_string()) {
        c.system = j.at("system").get<std::string>();
      } else {
        c.inline_system = j.at("system");
        c.system = "inline";
      }
    }
    if (j.contains("psi")) c.psi = j.at("psi").get<std::string>();
    if (j.contains("eps")) c.epsilon = j.at("eps").get<double>();
    if (j.contains("L")) c.L = j.at("L").get<double>();
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("np")) c.n_p = j.at("np").get<std::size_t>();
    if (j.contains("lift")) {
      const json& l = j.at("lift");
      check_keys(l, {"enabled", "ns", "m", "S"}, "config lift");
      c.force_lift = l.value("enabled", false);
      if (l.contains("ns")) c.lift_ns = l.at("ns").get<std::size_t>();
      if (l.contains("m")) c.lift_m = l.at("m").get<int>();
      if (l.contains("S")) c.lift_S = l.at("S").get<double>();
    }
    c.average = j.value("average", false);
    c.output_dir = j.value("output", std::string{});
    c.threads = j.value("threads", 1u);
    c.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("config: eps must lie in (0, 1)");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig c = run_config_from_json(read_json_file(path));
  // relative system paths resolve against the config file's directory
  if (!c.inline_system && !std::filesystem::exists(c.system)) {
    const auto candidate = std::filesystem::path(path).parent_path() / c.system;
    if (std::filesystem::exists(candidate)) c.system = candidate.string();
  }
  return c;
}

DynamicalSystem build_system(const RunConfig& cfg) {
  if (cfg.inline_system) return system_from_json(*cfg.inline_system);
  return resolve_system(cfg.system);
}

PipelineOptions pipeline_options(const RunConfig& cfg, double T) {
  PipelineOptions o;
  o.epsilon = cfg.epsilon;
  o.L = cfg.L;
  o.R = cfg.R;
  o.n_p = cfg.n_p;
  o.force_lift = cfg.force_lift;
  if (cfg.lift_ns || cfg.lift_m || cfg.lift_S) {
    o.lift = make_lift_config(T, cfg.lift_ns.value_or(256), cfg.lift_m.value_or(4), cfg.lift_S);
  }
  o.average = cfg.average;
  o.threads = cfg.threads;
  return o;
}

json to_json(const RunConfig& c) {
  json j;
  j["system"] = c.inline_system ? *c.inline_system : json(c.system);
  j["psi"] = c.psi;
  j["eps"] = c.epsilon;
  if (c.L) j["L"] = *c.L;
  if (c.R) j["R"] = *c.R;
  if (c.n_p) j["np"] = *c.n_p;
  json lift = {{"enabled", c.force_lift}};
  if (c.lift_ns) lift["ns"] = *c.lift_ns;
  if (c.lift_m) lift["m"] = *c.lift_m;
  if (c.lift_S) lift["S"] = *c.lift_S;
  j["lift"] = lift;
  j["average"] = c.average;
  j["output"] = c.output_dir;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j;
}

}  // namespace schr
