#include <charconv>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "covlab/sampling.hpp"

namespace covlab::exp {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("table " + name + ": row width differs from header");
  rows.push_back(std::move(row));
}

std::string Table::csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      // Cells are numbers or identifiers; quote anything that could split a row.
      if (cells[i].find_first_of(",\"\n") != std::string::npos) {
        out += '"';
        for (char c : cells[i]) {
          if (c == '"') out += '"';
          out += c;
        }
        out += '"';
      } else {
        out += cells[i];
      }
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ScenarioReport::find(const std::string& name) const {
  for (const Check& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool add_check(ScenarioReport& report, std::string name, bool pass, std::string detail, json data) {
  report.checks.push_back(Check{std::move(name), pass, std::move(detail), std::move(data)});
  return pass;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Fields::Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
  if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
}

void Fields::fail(const std::string& key, const std::string& what) const {
  throw ConfigError((path_.empty() ? key : path_ + "." + key) + ": " + what);
}

const json& Fields::at(const std::string& key) {
  used_.insert(key);
  if (!obj_.contains(key)) fail(key, "missing");
  return obj_.at(key);
}

double Fields::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

double Fields::positive(const std::string& key) {
  const double x = number(key);
  if (!(x > 0.0)) fail(key, "must be positive");
  return x;
}

std::int64_t Fields::integer(const std::string& key, std::int64_t lo, std::int64_t hi) {
  const json& v = at(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

bool Fields::boolean(const std::string& key) {
  const json& v = at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Fields::text(const std::string& key, const std::vector<std::string>& allowed) {
  const json& v = at(key);
  if (!v.is_string()) fail(key, "expected a string");
  std::string s = v.get<std::string>();
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    fail(key, "'" + s + "' is not one of " + list);
  }
  return s;
}

std::vector<double> Fields::numbers(const std::string& key, std::size_t min_size) {
  const json& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  if (v.size() < min_size) fail(key, "needs at least " + std::to_string(min_size) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) fail(key + "[" + std::to_string(i) + "]", "expected a finite number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<std::int64_t> Fields::integers(const std::string& key, std::int64_t lo, std::int64_t hi, std::size_t min_size) {
  const json& v = at(key);
  if (!v.is_array()) fail(key, "expected an array of integers");
  if (v.size() < min_size) fail(key, "needs at least " + std::to_string(min_size) + " entries");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string k = key + "[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) fail(k, "expected an integer");
    const auto x = v[i].get<std::int64_t>();
    if (x < lo || x > hi) fail(k, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(x);
  }
  return out;
}

Fields Fields::object(const std::string& key) {
  const json& v = at(key);
  if (!v.is_object()) fail(key, "expected an object");
  return Fields(v, path_.empty() ? key : path_ + "." + key);
}

void Fields::finish() const {
  for (const auto& [k, v] : obj_.items()) {
    if (!used_.count(k)) fail(k, "unknown field");
  }
}

Common read_common(const json& config, bool seeded) {
  Fields top(config, "");
  Common c;
  c.scenario = top.text("scenario");
  if (seeded) {
    const auto n = top.integer("seeds", 1, 100000);
    c.master_seed = static_cast<std::uint64_t>(top.integer("master_seed", 0, std::int64_t{1} << 62));
    for (std::int64_t i = 0; i < n; ++i) c.seeds.push_back(trial_seed(c.master_seed, static_cast<std::uint64_t>(i)));
  }
  // Touch the sections the scenario reads itself so finish() only flags strays.
  if (top.has("params")) top.object("params");
  if (top.has("thresholds")) top.object("thresholds");
  if (top.has("description")) top.text("description");
  top.finish();
  return c;
}

}  // namespace covlab::exp
