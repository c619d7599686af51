#pragma once

// Scenario files: a small TOML subset with tables, arrays of tables, numbers,
// booleans, strings and (nested) inline arrays.
//
//   [walker]      h, g, m, L_max
//   [cycle]       L_c, T_c
//   [controller]  kind = "none" | "pole-place" | "lqr"
//                 poles = [l1, l2]  or  conjugate_poles = [re, im]
//                 Q = [[q11, q12], [q21, q22]], R = r  or  R = [r1, r2, ...]
//   [[disturbance]] step_index, phase, F, duration
//   [run]         n_steps, sample_rate_hz, output_dir, formats, push_model

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipwalk/simulation.hpp"

namespace lipwalk::cli {

enum class ControllerKind { none, pole_place, lqr };

std::string_view to_string(ControllerKind kind);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::none;
  PolePair poles = PolePair::real(0.0, 0.0);
  Mat2 Q = Mat2::Identity();
  std::vector<double> R{1.0};
};

struct RunConfig {
  int n_steps = 20;
  double sample_rate_hz = 1000.0;
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_svg = true;
  PushModel push_model = PushModel::exact_force;
};

struct ScenarioConfig {
  WalkerParams walker = WalkerParams::reference();
  double L_c = 0.5;
  double T_c = 0.4;
  ControllerConfig controller;
  std::vector<Disturbance> disturbances;
  RunConfig run;
};

/// Parses and validates a scenario. Unknown tables or keys and malformed
/// values throw ConfigError; violated model bounds propagate the model's own
/// error (InvalidArgument, ConstraintViolation).
ScenarioConfig parse_config(std::string_view text);

/// Throws OutputError if the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Parses "csv,svg" style lists into the run flags.
void apply_formats(RunConfig& run, std::string_view comma_list);

}  // namespace lipwalk::cli
