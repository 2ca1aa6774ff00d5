#include "hpsens/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "hpsens/error.hpp"
#include "hpsens/toml_lite.hpp"
#include "json.hpp"

namespace hps {

namespace {

constexpr std::string_view kAxisPrefix = "hp.";

struct RawRow {
  std::size_t line = 0;
  std::string algorithm;
  std::string environment;
  std::int64_t seed = 0;
  std::vector<std::pair<std::string, AxisValue>> axes;
  Outcome outcome;
  bool diverged = false;
};

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line) + ": " + what);
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::optional<double> non_finite_word(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "+infinity") return inf;
  if (lower == "-inf" || lower == "-infinity") return -inf;
  if (lower == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::nullopt;
}

std::int64_t parse_seed_text(std::string_view text, std::size_t line) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    malformed(line, "seed '" + std::string(text) + "' is not an integer");
  return v;
}

double json_perf(const nlohmann::json& v, std::size_t line, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string())
    if (auto x = non_finite_word(v.get<std::string>())) return *x;
  malformed(line, std::string(what) + " must be a number");
}

RawRow parse_json_row(const std::string& text, std::size_t line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) malformed(line, "expected a JSON object");
  RawRow row;
  row.line = line;
  bool has_perf = false;
  bool has_curve = false;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (key == "alg") {
      if (!v.is_string()) malformed(line, "'alg' must be a string");
      row.algorithm = v.get<std::string>();
    } else if (key == "env") {
      if (!v.is_string()) malformed(line, "'env' must be a string");
      row.environment = v.get<std::string>();
    } else if (key == "seed") {
      if (!v.is_number_integer()) malformed(line, "'seed' must be an integer");
      row.seed = v.get<std::int64_t>();
    } else if (key == "perf") {
      has_perf = true;
      row.outcome = json_perf(v, line, "'perf'");
    } else if (key == "curve") {
      has_curve = true;
      if (!v.is_array()) malformed(line, "'curve' must be an array");
      ReturnCurve curve;
      for (const auto& x : v) curve.push_back(json_perf(x, line, "curve entry"));
      row.outcome = std::move(curve);
    } else if (key == "diverged") {
      if (!v.is_boolean()) malformed(line, "'diverged' must be a boolean");
      row.diverged = v.get<bool>();
    } else if (key.starts_with(kAxisPrefix)) {
      const std::string axis = key.substr(kAxisPrefix.size());
      if (v.is_number()) {
        row.axes.emplace_back(axis, v.get<double>());
      } else if (v.is_string()) {
        row.axes.emplace_back(axis, v.get<std::string>());
      } else {
        malformed(line, "'" + key + "' must be a number or string");
      }
    } else {
      malformed(line, "unknown key '" + key + "'");
    }
  }
  if (!obj.contains("alg") || !obj.contains("env") || !obj.contains("seed"))
    malformed(line, "row needs 'alg', 'env' and 'seed'");
  if (has_perf == has_curve) malformed(line, "row needs exactly one of 'perf' or 'curve'");
  return row;
}

// RFC 4180 style field splitting (quoted fields, doubled quotes).
std::vector<std::string> split_csv(const std::string& text, std::size_t line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty()) malformed(line, "stray quote in CSV field");
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) malformed(line, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return fields;
}

std::vector<RawRow> read_jsonl(std::istream& in) {
  std::vector<RawRow> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(parse_json_row(text, line));
  }
  return rows;
}

std::vector<RawRow> read_csv(std::istream& in) {
  std::vector<RawRow> rows;
  std::string text;
  std::size_t line = 0;
  std::vector<std::string> header;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    auto fields = split_csv(text, line);
    if (header.empty()) {
      header = std::move(fields);
      std::set<std::string> seen;
      for (const auto& name : header) {
        if (!seen.insert(name).second) malformed(line, "duplicate CSV column '" + name + "'");
        if (name == "curve") malformed(line, "'curve' columns are not supported in CSV; use JSONL");
        if (name != "alg" && name != "env" && name != "seed" && name != "perf" && name != "diverged" &&
            !name.starts_with(kAxisPrefix))
          malformed(line, "unknown column '" + name + "'");
      }
      for (const char* required : {"alg", "env", "seed", "perf"})
        if (!seen.contains(required)) malformed(line, std::string("missing CSV column '") + required + "'");
      continue;
    }
    if (fields.size() != header.size())
      malformed(line, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    RawRow row;
    row.line = line;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& name = header[i];
      const std::string& value = fields[i];
      if (name == "alg") {
        row.algorithm = value;
      } else if (name == "env") {
        row.environment = value;
      } else if (name == "seed") {
        row.seed = parse_seed_text(value, line);
      } else if (name == "perf") {
        if (auto x = parse_double(value)) {
          row.outcome = *x;
        } else if (auto y = non_finite_word(value)) {
          row.outcome = *y;
        } else if (value.empty()) {
          row.outcome = std::numeric_limits<double>::quiet_NaN();
        } else {
          malformed(line, "perf '" + value + "' is not a number");
        }
      } else if (name == "diverged") {
        if (value == "true" || value == "1") {
          row.diverged = true;
        } else if (value == "false" || value == "0" || value.empty()) {
          row.diverged = false;
        } else {
          malformed(line, "diverged '" + value + "' is not a boolean");
        }
      } else {
        const std::string axis = name.substr(kAxisPrefix.size());
        if (auto x = parse_double(value)) {
          row.axes.emplace_back(axis, *x);
        } else {
          row.axes.emplace_back(axis, value);
        }
      }
    }
    if (row.algorithm.empty() || row.environment.empty()) malformed(line, "empty 'alg' or 'env'");
    rows.push_back(std::move(row));
  }
  return rows;
}

HyperSpace infer_space(const std::vector<RawRow>& rows) {
  struct Levels {
    std::vector<double> numbers;
    std::set<std::string> texts;
    std::size_t first_numeric_line = 0;
    std::size_t first_text_line = 0;
  };
  std::map<std::string, Levels> levels;
  for (const auto& row : rows) {
    for (const auto& [name, value] : row.axes) {
      auto& lv = levels[name];
      if (const auto* x = std::get_if<double>(&value)) {
        lv.numbers.push_back(*x);
        if (lv.first_numeric_line == 0) lv.first_numeric_line = row.line;
      } else {
        lv.texts.insert(std::get<std::string>(value));
        if (lv.first_text_line == 0) lv.first_text_line = row.line;
      }
      if (!lv.numbers.empty() && !lv.texts.empty())
        malformed(row.line, "axis '" + name + "' mixes numeric and text values");
    }
  }
  std::vector<Axis> axes;
  for (auto& [name, lv] : levels) {
    Axis axis{name, {}};
    if (!lv.numbers.empty()) {
      std::sort(lv.numbers.begin(), lv.numbers.end());
      lv.numbers.erase(std::unique(lv.numbers.begin(), lv.numbers.end()), lv.numbers.end());
      for (double x : lv.numbers) {
        if (!std::isfinite(x)) malformed(lv.first_numeric_line, "axis '" + name + "' has a non-finite level");
        axis.values.emplace_back(x);
      }
    } else {
      for (const auto& s : lv.texts) axis.values.emplace_back(s);
    }
    axes.push_back(std::move(axis));
  }
  return HyperSpace(std::move(axes));
}

RunSet assemble(std::vector<RawRow> rows, const PerfMetric& metric, const std::optional<HyperSpace>& manifest) {
  HyperSpace space = manifest ? *manifest : infer_space(rows);
  std::vector<RunRecord> runs;
  runs.reserve(rows.size());
  std::set<std::tuple<std::string, std::string, std::size_t, std::int64_t>> seen;
  for (auto& row : rows) {
    SettingCoord coord;
    coord.indices.assign(space.axis_count(), 0);
    std::vector<bool> assigned(space.axis_count(), false);
    for (const auto& [name, value] : row.axes) {
      auto axis = space.find_axis(name);
      if (!axis) {
        if (manifest)
          throw Error(ErrorKind::UnknownAxisValue,
                      "line " + std::to_string(row.line) + ": axis '" + name + "' is not declared in the manifest");
        malformed(row.line, "unknown axis '" + name + "'");
      }
      if (assigned[*axis]) malformed(row.line, "axis '" + name + "' given twice");
      auto level = space.find_value(*axis, value);
      if (!level)
        throw Error(ErrorKind::UnknownAxisValue, "line " + std::to_string(row.line) + ": value " +
                                                     format_axis_value(value) + " of axis '" + name +
                                                     "' is off the grid");
      coord.indices[*axis] = *level;
      assigned[*axis] = true;
    }
    for (std::size_t i = 0; i < assigned.size(); ++i)
      if (!assigned[i]) malformed(row.line, "missing axis 'hp." + space.axes()[i].name + "'");

    double perf = 0.0;
    try {
      perf = perf_from_outcome(row.outcome, metric);
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(row.line) + ": " + e.what());
    }
    const std::size_t linear = space.linear_index(coord);
    if (!seen.emplace(row.algorithm, row.environment, linear, row.seed).second)
      throw Error(ErrorKind::DuplicateRun, "line " + std::to_string(row.line) + ": repeated run for alg '" +
                                               row.algorithm + "', env '" + row.environment + "', seed " +
                                               std::to_string(row.seed));
    runs.push_back(RunRecord{std::move(row.algorithm), std::move(row.environment), std::move(coord), row.seed, perf,
                             row.diverged});
  }
  return RunSet(std::move(space), std::move(runs));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PerfMetric PerfMetric::parse(std::string_view text) {
  if (text == "auc") return auc();
  constexpr std::string_view prefix = "final:";
  if (text.starts_with(prefix)) {
    const auto digits = text.substr(prefix.size());
    std::size_t w = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), w);
    if (ec == std::errc() && end == digits.data() + digits.size() && !digits.empty() && w > 0) return final_return(w);
  }
  throw Error(ErrorKind::InvalidArgument, "metric must be 'auc' or 'final:<positive window>', got '" +
                                              std::string(text) + "'");
}

std::string PerfMetric::to_string() const {
  return kind == Kind::Auc ? std::string("auc") : "final:" + std::to_string(window);
}

double perf_from_outcome(const Outcome& outcome, const PerfMetric& metric) {
  if (const auto* scalar = std::get_if<double>(&outcome)) return *scalar;
  const auto& curve = std::get<ReturnCurve>(outcome);
  if (curve.empty()) throw Error(ErrorKind::EmptyCurve, "return curve has no entries");
  if (metric.kind == PerfMetric::Kind::Auc)
    return std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
  if (metric.window == 0) throw Error(ErrorKind::InvalidArgument, "final-return window must be positive");
  if (metric.window > curve.size())
    throw Error(ErrorKind::WindowTooLarge, "window " + std::to_string(metric.window) + " exceeds curve length " +
                                               std::to_string(curve.size()));
  return std::accumulate(curve.end() - static_cast<std::ptrdiff_t>(metric.window), curve.end(), 0.0);
}

RunSet::RunSet(HyperSpace space, std::vector<RunRecord> runs) : space_(std::move(space)), runs_(std::move(runs)) {
  std::set<std::tuple<std::string_view, std::string_view, std::size_t, std::int64_t>> seen;
  for (auto& run : runs_) {
    if (!space_.contains(run.setting))
      throw Error(ErrorKind::UnknownAxisValue, "run setting lies outside the hyperparameter space");
    if (!seen.emplace(run.algorithm, run.environment, space_.linear_index(run.setting), run.seed).second)
      throw Error(ErrorKind::DuplicateRun, "repeated run for alg '" + run.algorithm + "', env '" + run.environment +
                                               "', seed " + std::to_string(run.seed));
    if (!std::isfinite(run.perf)) run.diverged = true;
  }
}

std::vector<std::string> RunSet::algorithms() const {
  std::set<std::string> names;
  for (const auto& run : runs_) names.insert(run.algorithm);
  return {names.begin(), names.end()};
}

std::vector<std::string> RunSet::environments() const {
  std::set<std::string> names;
  for (const auto& run : runs_) names.insert(run.environment);
  return {names.begin(), names.end()};
}

FileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FileFormat::Csv : FileFormat::Jsonl;
}

RunSet parse_runs(std::istream& in, FileFormat format, const PerfMetric& metric,
                  const std::optional<HyperSpace>& manifest) {
  auto rows = format == FileFormat::Csv ? read_csv(in) : read_jsonl(in);
  return assemble(std::move(rows), metric, manifest);
}

RunSet load_runs(const std::filesystem::path& path, FileFormat format, const PerfMetric& metric,
                 const std::optional<HyperSpace>& manifest) {
  std::istringstream in(read_file(path));
  return parse_runs(in, format, metric, manifest);
}

HyperSpace parse_manifest(std::string_view text) {
  const auto doc = parse_toml_lite(text);
  if (!doc.contains("axes") || !doc["axes"].is_object())
    throw Error(ErrorKind::InvalidArgument, "manifest needs an [axes] table");
  std::vector<Axis> axes;
  for (auto it = doc["axes"].begin(); it != doc["axes"].end(); ++it) {
    if (!it.value().is_array()) throw Error(ErrorKind::InvalidArgument, "axis '" + it.key() + "' must be an array");
    Axis axis{it.key(), {}};
    for (const auto& v : it.value()) {
      if (v.is_number()) {
        axis.values.emplace_back(v.get<double>());
      } else if (v.is_string()) {
        axis.values.emplace_back(v.get<std::string>());
      } else {
        throw Error(ErrorKind::InvalidArgument, "axis '" + it.key() + "' has a value that is neither number nor string");
      }
    }
    axes.push_back(std::move(axis));
  }
  return HyperSpace(std::move(axes));
}

HyperSpace load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

std::optional<std::size_t> TableLayout::algorithm_index(std::string_view name) const {
  auto it = std::find(algorithms.begin(), algorithms.end(), name);
  if (it == algorithms.end()) return std::nullopt;
  return static_cast<std::size_t>(it - algorithms.begin());
}

std::optional<std::size_t> TableLayout::environment_index(std::string_view name) const {
  auto it = std::find(environments.begin(), environments.end(), name);
  if (it == environments.end()) return std::nullopt;
  return static_cast<std::size_t>(it - environments.begin());
}

Cell summarize_cell(std::span<const Observation> runs, double threshold) {
  Cell cell;
  cell.n_runs = runs.size();
  std::vector<double> survivors;
  survivors.reserve(runs.size());
  for (const auto& obs : runs) {
    if (obs.diverged || !std::isfinite(obs.perf)) {
      ++cell.n_diverged;
    } else {
      survivors.push_back(obs.perf);
    }
  }
  if (cell.n_runs == 0 || survivors.empty()) return cell;
  const double fraction = static_cast<double>(cell.n_diverged) / static_cast<double>(cell.n_runs);
  if (fraction > threshold) return cell;
  std::sort(survivors.begin(), survivors.end());
  cell.retained = true;
  // Shifted by the minimum so that a constant cell reproduces its value exactly.
  const double lo = survivors.front();
  double shifted = 0.0;
  for (double v : survivors) shifted += v - lo;
  cell.mean_perf = std::clamp(lo + shifted / static_cast<double>(survivors.size()), lo, survivors.back());
  return cell;
}

CellTable::CellTable(TableLayout layout, std::vector<Cell> cells, double threshold)
    : layout_(std::move(layout)), cells_(std::move(cells)), threshold_(threshold) {
  if (cells_.size() != layout_.cell_count())
    throw Error(ErrorKind::InvalidArgument, "cell vector does not match the table layout");
}

CellTable build_cells(const RunSet& runs, double threshold) {
  if (runs.empty()) throw Error(ErrorKind::InvalidArgument, "cannot aggregate an empty run set");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "divergence threshold must lie in [0, 1]");
  TableLayout layout{runs.space(), runs.algorithms(), runs.environments()};
  std::vector<std::vector<Observation>> grouped(layout.cell_count());
  for (const auto& run : runs.runs()) {
    const auto a = *layout.algorithm_index(run.algorithm);
    const auto e = *layout.environment_index(run.environment);
    grouped[layout.index(a, e, layout.space.linear_index(run.setting))].push_back({run.perf, run.diverged});
  }
  std::vector<Cell> cells;
  cells.reserve(grouped.size());
  for (const auto& group : grouped) cells.push_back(summarize_cell(group, threshold));
  return CellTable(std::move(layout), std::move(cells), threshold);
}

}  // namespace hps
