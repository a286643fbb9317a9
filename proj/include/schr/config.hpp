#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>

#include "schr/harness.hpp"

namespace schr {

// System from a JSON object. Either a dense literal
//   {"dim": 2, "A": [[...]], "b": [...], "u0": [...], "T": 1, "time_dependent": false}
// with complex entries written as numbers or [re, im], plus an optional
// modulation A(t) = A + sin(omega t) A1, b(t) = b + sin(omega t) b1; or a
// generator {"builtin": "diag" | "convection-diffusion-1d", ...}; or
// {"builtin": "<name>"} for any builtin_system name.
DynamicalSystem system_from_json(const nlohmann::json& j);

// Builtin name or path to a JSON file holding a system object.
DynamicalSystem resolve_system(const std::string& name_or_path);

nlohmann::json read_json_file(const std::string& path);

struct RunConfig {
  std::string system = "std2";        // builtin name or file path
  std::optional<nlohmann::json> inline_system;
  std::string psi = "erf:eps=1e-6";
  double epsilon = 1e-6;
  std::optional<double> L;
  std::optional<double> R;
  std::optional<std::size_t> n_p;
  bool force_lift = false;
  std::optional<std::size_t> lift_ns;
  std::optional<int> lift_m;
  std::optional<double> lift_S;
  bool average = false;
  std::string output_dir;
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

// Keys: system (string or object), psi, eps, L, R, np, lift {enabled, ns, m, S},
// average, output, threads, seed. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

DynamicalSystem build_system(const RunConfig& cfg);
PipelineOptions pipeline_options(const RunConfig& cfg, double T);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace schr
