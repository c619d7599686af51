#pragma once

// Static SVG figures. Output depends only on the data passed in, so figures
// regenerated from the CSV files are byte-identical to the originals.

#include <span>
#include <string>

#include "lipwalk/cli/csv.hpp"

namespace lipwalk::cli {

// COM position (world frame), COP and COM velocity against time.
std::string render_com_figure(std::span<const Sample> samples);

// Phase portrait; the last step is drawn at double stroke width as the cycle.
std::string render_phase_figure(std::span<const StepRecord> steps, std::span<const Sample> samples);

// Applied step length against step index, one series per R value.
std::string render_step_length_figure(std::span<const StepLengthRow> rows);

}  // namespace lipwalk::cli
