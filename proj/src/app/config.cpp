#include "app/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace mocu::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// "prefix.<digits>" keys are allowed where the schema lists "prefix.*".
bool key_known(const std::vector<std::string>& keys, const std::string& key) {
  for (const std::string& k : keys) {
    if (k == key) return true;
    if (k.size() > 2 && k.ends_with(".*")) {
      const std::string prefix = k.substr(0, k.size() - 1);
      if (key.size() > prefix.size() && key.starts_with(prefix) &&
          std::all_of(key.begin() + static_cast<std::ptrdiff_t>(prefix.size()), key.end(), ::isdigit))
        return true;
    }
  }
  return false;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

}  // namespace

const std::map<std::string, std::vector<std::string>>& config_schema() {
  static const std::map<std::string, std::vector<std::string>> schema{
      {"run", {"seed", "out_dir", "parallelism", "log_level"}},
      {"sim-quadratic",
       {"runs", "iterations", "initial_actions", "grid", "theta1_range", "r_range", "theta3_range", "w_range",
        "mc_theta_samples", "mc_outcome_samples", "exact_lookahead", "common_outcome_draws", "gpr_restarts",
        "noise", "policies", "plot", "max_failure_fraction"}},
      {"gene-network", {"fixture", "sequential_steps", "delta"}},
      {"surrogate",
       {"dopants", "concentrations", "tau", "c1", "c2", "c3", "c4", "particles", "h_range", "r_range",
        "particle_layout", "dopant.*", "outcome_rule", "quadrature_order", "mc_outcome_samples", "min_ess",
        "sequential_steps"}},
      {"kg-demo", {"instances", "min_actions", "max_actions", "ego"}},
  };
  return schema;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  c.source_ = source;
  std::istringstream in(text);
  std::string raw, section = "run";
  std::size_t line = 0;
  const auto& schema = config_schema();
  auto err = [&](const std::string& msg) { fail(ErrorCode::kConfig, source + ":" + std::to_string(line) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') err("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema.contains(section)) err("unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) err("expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) err("empty key");
    if (!key_known(schema.at(section), key)) err("unknown key '" + key + "' in [" + section + "]");
    if (c.values_[section].contains(key)) err("duplicate key '" + key + "' in [" + section + "]");
    c.values_[section][key] = {value, line};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Config c = parse(ss.str(), path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  return c;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto& schema = config_schema();
  if (!schema.contains(section)) fail(ErrorCode::kConfig, "unknown section [" + section + "]");
  if (!key_known(schema.at(section), key)) fail(ErrorCode::kConfig, "unknown key '" + key + "' in [" + section + "]");
  values_[section][key] = {value, 0};
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

void Config::bad_value(const std::string& section, const std::string& key, const std::string& why) const {
  const ConfigValue* v = find(section, key);
  const std::string where = v && v->line ? source_ + ":" + std::to_string(v->line) : source_ + " (override)";
  fail(ErrorCode::kConfig, where + ": [" + section + "] " + key + ": " + why);
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(section, key);
  return v ? v->text : fallback;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const char* end = v->text.data() + v->text.size();
  const auto r = std::from_chars(v->text.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) bad_value(section, key, "expected a nonnegative integer, got '" + v->text + "'");
  return out;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  double out = 0.0;
  if (!parse_double(v->text, out)) bad_value(section, key, "expected a number, got '" + v->text + "'");
  return out;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (v->text == "true" || v->text == "1" || v->text == "yes") return true;
  if (v->text == "false" || v->text == "0" || v->text == "no") return false;
  bad_value(section, key, "expected true or false, got '" + v->text + "'");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(v->text)) {
    double d = 0.0;
    if (!parse_double(item, d)) bad_value(section, key, "expected numbers, got '" + item + "'");
    out.push_back(d);
  }
  return out;
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  const ConfigValue* v = find(section, key);
  return v ? split_list(v->text) : fallback;
}

std::vector<std::string> Config::indexed_keys(const std::string& section, const std::string& prefix) const {
  std::vector<std::pair<std::uint64_t, std::string>> found;
  const auto s = values_.find(section);
  if (s == values_.end()) return {};
  for (const auto& [k, v] : s->second)
    if (k.starts_with(prefix + ".")) found.emplace_back(std::stoull(k.substr(prefix.size() + 1)), k);
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& f : found) out.push_back(f.second);
  return out;
}

std::string Config::resolved() const {
  std::ostringstream os;
  for (const auto& [section, keys] : values_) {
    if (keys.empty()) continue;
    os << '[' << section << "]\n";
    for (const auto& [k, v] : keys) os << k << " = " << v.text << '\n';
  }
  return os.str();
}

}  // namespace mocu::app
