#include "lipwalk/cli/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "lipwalk/errors.hpp"

namespace lipwalk::cli {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

template <typename Row>
std::vector<Row> read_rows(std::istream& is, std::string_view header, std::size_t columns,
                           Row (*convert)(const std::vector<std::string_view>&)) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV, expected header '" + std::string(header) + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ConfigError("unexpected CSV header '" + line + "'");
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " fields");
    }
    rows.push_back(convert(fields));
  }
  return rows;
}

int parse_int(std::string_view text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer '" + std::string(text) + "'");
  }
  return v;
}

bool parse_flag(std::string_view text) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw ConfigError("invalid flag '" + std::string(text) + "'");
}

Sample to_sample(const std::vector<std::string_view>& f) {
  return {parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
          parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
}

StepRecord to_step(const std::vector<std::string_view>& f) {
  StepRecord r;
  r.index = parse_int(f[0]);
  r.t_start = parse_double(f[1]);
  r.start_state = {parse_double(f[2]), parse_double(f[3])};
  r.end_state = {parse_double(f[4]), parse_double(f[5])};
  r.L_commanded = parse_double(f[6]);
  r.L_applied = parse_double(f[7]);
  r.clamped = parse_flag(f[8]);
  r.error_norm = parse_double(f[9]);
  r.cop_world = parse_double(f[10]);
  return r;
}

StepLengthRow to_step_length(const std::vector<std::string_view>& f) {
  return {parse_double(f[0]), parse_int(f[1]), parse_double(f[2]), parse_double(f[3]), parse_flag(f[4])};
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid number '" + std::string(text) + "'");
  }
  return v;
}

void write_trace_csv(std::ostream& os, std::span<const Sample> samples) {
  os << kTraceHeader << '\n';
  for (const Sample& s : samples) {
    os << format_double(s.t) << ',' << format_double(s.x_world) << ',' << format_double(s.x_rel) << ','
       << format_double(s.xdot) << ',' << format_double(s.cop_world) << ',' << format_double(s.fx) << ','
       << format_double(s.fy) << '\n';
  }
}

void write_steps_csv(std::ostream& os, std::span<const StepRecord> steps) {
  os << kStepsHeader << '\n';
  for (const StepRecord& r : steps) {
    os << r.index << ',' << format_double(r.t_start) << ',' << format_double(r.start_state.x) << ','
       << format_double(r.start_state.xdot) << ',' << format_double(r.end_state.x) << ','
       << format_double(r.end_state.xdot) << ',' << format_double(r.L_commanded) << ','
       << format_double(r.L_applied) << ',' << (r.clamped ? 1 : 0) << ',' << format_double(r.error_norm) << ','
       << format_double(r.cop_world) << '\n';
  }
}

void write_step_length_csv(std::ostream& os, std::span<const StepLengthRow> rows) {
  os << kStepLengthHeader << '\n';
  for (const StepLengthRow& r : rows) {
    os << format_double(r.R) << ',' << r.index << ',' << format_double(r.L_commanded) << ','
       << format_double(r.L_applied) << ',' << (r.clamped ? 1 : 0) << '\n';
  }
}

std::vector<Sample> read_trace_csv(std::istream& is) { return read_rows<Sample>(is, kTraceHeader, 7, &to_sample); }

std::vector<StepRecord> read_steps_csv(std::istream& is) {
  return read_rows<StepRecord>(is, kStepsHeader, 11, &to_step);
}

std::vector<StepLengthRow> read_step_length_csv(std::istream& is) {
  return read_rows<StepLengthRow>(is, kStepLengthHeader, 5, &to_step_length);
}

}  // namespace lipwalk::cli
