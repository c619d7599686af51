#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lipwalk/simulation.hpp"

namespace lipwalk::cli {

inline constexpr const char* kTraceHeader = "t,x_world,x_rel,xdot,cop_world,fx,fy";
inline constexpr const char* kStepsHeader =
    "index,t_start,x0,xdot0,x_end,xdot_end,L_commanded,L_applied,clamped,error_norm,cop_world";
inline constexpr const char* kStepLengthHeader = "R,index,L_commanded,L_applied,clamped";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Step lengths of one run in a multi-run comparison.
struct StepLengthRow {
  double R = 0.0;
  int index = 0;
  double L_commanded = 0.0;
  double L_applied = 0.0;
  bool clamped = false;
};

void write_trace_csv(std::ostream& os, std::span<const Sample> samples);
void write_steps_csv(std::ostream& os, std::span<const StepRecord> steps);
void write_step_length_csv(std::ostream& os, std::span<const StepLengthRow> rows);

// Readers throw ConfigError on a wrong header or malformed row.
std::vector<Sample> read_trace_csv(std::istream& is);
std::vector<StepRecord> read_steps_csv(std::istream& is);
std::vector<StepLengthRow> read_step_length_csv(std::istream& is);

}  // namespace lipwalk::cli
