#include "lipwalk/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "lipwalk/errors.hpp"

namespace lipwalk::cli {

namespace {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
};

using Table = std::map<std::string, Value>;

struct Document {
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

class LineParser {
 public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  Value value() {
    skip_ws();
    if (done()) fail(line_, "missing value");
    const char c = text_[pos_];
    if (c == '"') return {string()};
    if (c == '[') return {array()};
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    return {number()};
  }

  void expect_end() {
    skip_ws();
    if (!done() && text_[pos_] != '#') fail(line_, "unexpected trailing text");
  }

 private:
  bool done() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string string() {
    ++pos_;
    const auto close = text_.find('"', pos_);
    if (close == std::string_view::npos) fail(line_, "unterminated string");
    std::string out(text_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return out;
  }

  Array array() {
    ++pos_;
    Array out;
    skip_ws();
    if (!done() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(value());
      skip_ws();
      if (done()) fail(line_, "unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail(line_, "expected ',' or ']' in array");
    }
  }

  double number() {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                                  text_[end] == '-' || text_[end] == '+' || text_[end] == '_')) {
      ++end;
    }
    std::string token;
    for (char c : text_.substr(pos_, end - pos_)) {
      if (c != '_') token.push_back(c);
    }
    if (!token.empty() && token.front() == '+') token.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
      fail(line_, "invalid number '" + std::string(text_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return v;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Document parse_document(std::string_view text) {
  Document doc;
  Table* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.starts_with("[[")) {
      const auto close = line.find("]]");
      if (close == std::string_view::npos) fail(line_no, "unterminated table-array header");
      const std::string name(trim(line.substr(2, close - 2)));
      auto& list = doc.table_arrays[name];
      list.emplace_back();
      current = &list.back();
      continue;
    }
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) fail(line_no, "unterminated table header");
      const std::string name(trim(line.substr(1, close - 1)));
      if (doc.tables.contains(name)) fail(line_no, "duplicate table [" + name + "]");
      current = &doc.tables[name];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    if (current == nullptr) fail(line_no, "key outside of any table");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) fail(line_no, "empty key");
    LineParser vp(line.substr(eq + 1), line_no);
    Value v = vp.value();
    vp.expect_end();
    if (!current->emplace(key, std::move(v)).second) fail(line_no, "duplicate key '" + key + "'");
  }
  return doc;
}

// Typed access with unknown-key detection.
class TableReader {
 public:
  TableReader(const Table& table, std::string name) : table_(table), name_(std::move(name)) {}

  // Rejects any key that was never looked up.
  void finish() const {
    for (const auto& [key, _] : table_) {
      if (!used_.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  const Value* find(const std::string& key) {
    used_.insert(key);
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const Value* v = find(key);
    return v ? as_number(*v, key) : fallback;
  }

  double required_number(const std::string& key) {
    const Value* v = find(key);
    if (!v) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
    return as_number(*v, key);
  }

  int integer(const std::string& key, int fallback) {
    const Value* v = find(key);
    if (!v) return fallback;
    const double d = as_number(*v, key);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(where(key) + " must be an integer");
    return static_cast<int>(d);
  }

  std::string string(const std::string& key, std::string fallback) {
    const Value* v = find(key);
    if (!v) return fallback;
    const auto* s = std::get_if<std::string>(&v->data);
    if (!s) throw ConfigError(where(key) + " must be a string");
    return *s;
  }

  std::vector<double> numbers(const std::string& key) {
    const Value* v = find(key);
    if (!v) return {};
    if (std::holds_alternative<double>(v->data)) return {std::get<double>(v->data)};
    const auto* arr = std::get_if<Array>(&v->data);
    if (!arr) throw ConfigError(where(key) + " must be a number or an array of numbers");
    std::vector<double> out;
    for (const Value& e : *arr) out.push_back(as_number(e, key));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const Value* v = find(key);
    if (!v) return {};
    const auto* arr = std::get_if<Array>(&v->data);
    if (!arr) throw ConfigError(where(key) + " must be an array of strings");
    std::vector<std::string> out;
    for (const Value& e : *arr) {
      const auto* s = std::get_if<std::string>(&e.data);
      if (!s) throw ConfigError(where(key) + " must be an array of strings");
      out.push_back(*s);
    }
    return out;
  }

  std::optional<Mat2> matrix(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    const auto* rows = std::get_if<Array>(&v->data);
    if (!rows || rows->size() != 2) throw ConfigError(where(key) + " must be a 2x2 nested array");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
      const auto* row = std::get_if<Array>(&(*rows)[static_cast<std::size_t>(r)].data);
      if (!row || row->size() != 2) throw ConfigError(where(key) + " must be a 2x2 nested array");
      for (int c = 0; c < 2; ++c) m(r, c) = as_number((*row)[static_cast<std::size_t>(c)], key);
    }
    return m;
  }

 private:
  std::string where(const std::string& key) const { return "[" + name_ + "]." + key; }

  double as_number(const Value& v, const std::string& key) const {
    const auto* d = std::get_if<double>(&v.data);
    if (!d) throw ConfigError(where(key) + " must be a number");
    return *d;
  }

  const Table& table_;
  std::string name_;
  std::set<std::string> used_;
};

const Table& table_or_empty(const Document& doc, const std::string& name) {
  static const Table empty;
  const auto it = doc.tables.find(name);
  return it == doc.tables.end() ? empty : it->second;
}

ControllerKind parse_kind(const std::string& s) {
  if (s == "none") return ControllerKind::none;
  if (s == "pole-place") return ControllerKind::pole_place;
  if (s == "lqr") return ControllerKind::lqr;
  throw ConfigError("[controller].kind must be one of none, pole-place, lqr (got '" + s + "')");
}

PushModel parse_push_model(const std::string& s) {
  if (s == "force") return PushModel::exact_force;
  if (s == "impulse") return PushModel::impulse;
  throw ConfigError("[run].push_model must be 'force' or 'impulse' (got '" + s + "')");
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::none: return "none";
    case ControllerKind::pole_place: return "pole-place";
    case ControllerKind::lqr: return "lqr";
  }
  return "?";
}

void apply_formats(RunConfig& run, std::string_view comma_list) {
  run.write_csv = false;
  run.write_svg = false;
  std::size_t start = 0;
  while (start <= comma_list.size()) {
    const auto comma = comma_list.find(',', start);
    const std::string_view item = trim(comma_list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item == "csv") {
      run.write_csv = true;
    } else if (item == "svg") {
      run.write_svg = true;
    } else if (!item.empty()) {
      throw ConfigError("unknown output format '" + std::string(item) + "' (expected csv or svg)");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

ScenarioConfig parse_config(std::string_view text) {
  const Document doc = parse_document(text);
  for (const auto& [name, _] : doc.tables) {
    if (name != "walker" && name != "cycle" && name != "controller" && name != "run") {
      throw ConfigError("unknown table [" + name + "]");
    }
  }
  for (const auto& [name, _] : doc.table_arrays) {
    if (name != "disturbance") throw ConfigError("unknown table array [[" + name + "]]");
  }

  ScenarioConfig cfg;
  {
    TableReader t(table_or_empty(doc, "walker"), "walker");
    const WalkerParams d = WalkerParams::reference();
    cfg.walker = WalkerParams(t.number("h", d.h()), t.number("g", d.g()), t.number("m", d.m()),
                              t.number("L_max", d.l_max()));
    t.finish();
  }
  {
    TableReader t(table_or_empty(doc, "cycle"), "cycle");
    cfg.L_c = t.number("L_c", cfg.L_c);
    cfg.T_c = t.number("T_c", cfg.T_c);
    t.finish();
  }
  // Validates L_c against L_max and T_c > 0.
  (void)design_cycle(cfg.walker, cfg.L_c, cfg.T_c);

  {
    TableReader t(table_or_empty(doc, "controller"), "controller");
    ControllerConfig& c = cfg.controller;
    c.kind = parse_kind(t.string("kind", "none"));
    const auto poles = t.numbers("poles");
    const auto conj = t.numbers("conjugate_poles");
    if (!poles.empty() && !conj.empty()) throw ConfigError("[controller] sets both poles and conjugate_poles");
    if (!poles.empty()) {
      if (poles.size() != 2) throw ConfigError("[controller].poles must have two entries");
      c.poles = PolePair::real(poles[0], poles[1]);
    } else if (!conj.empty()) {
      if (conj.size() != 2) throw ConfigError("[controller].conjugate_poles must be [re, im]");
      c.poles = PolePair::conjugate(conj[0], conj[1]);
    }
    if (auto Q = t.matrix("Q")) c.Q = *Q;
    const auto R = t.numbers("R");
    if (!R.empty()) c.R = R;
    for (double r : c.R) (void)LqrWeights(c.Q, r);
    t.finish();
  }

  if (const auto it = doc.table_arrays.find("disturbance"); it != doc.table_arrays.end()) {
    for (const Table& tbl : it->second) {
      TableReader t(tbl, "disturbance");
      Disturbance d;
      d.step_index = t.integer("step_index", d.step_index);
      d.phase = t.number("phase", d.phase);
      d.force = t.required_number("F");
      d.duration = t.required_number("duration");
      t.finish();
      cfg.disturbances.push_back(d);
    }
  }

  {
    TableReader t(table_or_empty(doc, "run"), "run");
    RunConfig& r = cfg.run;
    r.n_steps = t.integer("n_steps", r.n_steps);
    r.sample_rate_hz = t.number("sample_rate_hz", r.sample_rate_hz);
    r.output_dir = t.string("output_dir", r.output_dir);
    r.push_model = parse_push_model(t.string("push_model", "force"));
    if (const auto formats = t.strings("formats"); !formats.empty()) {
      std::string joined;
      for (const auto& f : formats) joined += f + ",";
      apply_formats(r, joined);
    }
    t.finish();
    if (r.n_steps < 1) throw ConfigError("[run].n_steps must be at least 1");
    if (!(r.sample_rate_hz > 0.0)) throw ConfigError("[run].sample_rate_hz must be positive");
  }
  validate_disturbances(cfg.disturbances, cfg.T_c, cfg.run.n_steps);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw OutputError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace lipwalk::cli
