#include "msdc/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "msdc/error.hpp"

namespace msdc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
  return v;
}

}  // namespace

ConfigSection::ConfigSection(std::string name, std::string source)
    : name_(std::move(name)), source_(std::move(source)) {}

bool ConfigSection::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void ConfigSection::set(const std::string& key, std::string value, int line) {
  entries_[key] = ConfigEntry{std::move(value), line};
}

void ConfigSection::reject_unknown(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [key, e] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(e, key, "unknown key");
    }
  }
}

const ConfigEntry& ConfigSection::entry(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(fmt::format("{}: section [{}] is missing required key '{}'", source_, name_, key));
  }
  return it->second;
}

void ConfigSection::fail(const ConfigEntry& e, std::string_view key, std::string_view msg) const {
  throw ConfigError(fmt::format("{}:{}: [{}] {}: {}", source_, e.line, name_, key, msg));
}

std::string ConfigSection::get_string(std::string_view key) const { return entry(key).value; }

double ConfigSection::get_double(std::string_view key) const {
  const auto& e = entry(key);
  auto v = parse_double(e.value);
  if (!v) fail(e, key, fmt::format("expected a number, got '{}'", e.value));
  return *v;
}

std::int64_t ConfigSection::get_int(std::string_view key) const {
  const auto& e = entry(key);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (e.value.empty() || end != e.value.c_str() + e.value.size() || errno == ERANGE) {
    fail(e, key, fmt::format("expected an integer, got '{}'", e.value));
  }
  return v;
}

std::vector<double> ConfigSection::get_double_list(std::string_view key) const {
  const auto& e = entry(key);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (t.empty()) continue;
    auto v = parse_double(t);
    if (!v) fail(e, key, fmt::format("expected a comma-separated list of numbers, got '{}'", t));
    out.push_back(*v);
  }
  return out;
}

double ConfigSection::get_double_or(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigSection::get_int_or(std::string_view key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::string ConfigSection::get_string_or(std::string_view key, std::string fallback) const {
  return has(key) ? get_string(key) : fallback;
}

RunConfig RunConfig::parse(std::istream& in, std::string source) {
  RunConfig cfg;
  cfg.source_ = source;
  ConfigSection* current = nullptr;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view view(raw);
    if (auto pos = view.find_first_of("#;"); pos != std::string_view::npos) view = view.substr(0, pos);
    const std::string line = trim(view);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(fmt::format("{}:{}: malformed section header '{}'", source, line_no, line));
      }
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections)) {
        throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source, line_no, name));
      }
      if (cfg.sections_.count(name)) {
        throw ConfigError(fmt::format("{}:{}: duplicate section [{}]", source, line_no, name));
      }
      current = &cfg.sections_.emplace(name, ConfigSection(name, source)).first->second;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_no, line));
    }
    if (current == nullptr) {
      throw ConfigError(fmt::format("{}:{}: key outside of any section", source, line_no));
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
    if (current->has(key)) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}' in [{}]", source, line_no, key, current->name()));
    }
    current->set(key, value, line_no);
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  RunConfig cfg = parse(in, path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool RunConfig::has_section(std::string_view name) const { return sections_.find(name) != sections_.end(); }

const ConfigSection& RunConfig::section(std::string_view name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError(fmt::format("{}: missing section [{}]", source_, name));
  return it->second;
}

const ConfigSection& RunConfig::section_or_empty(std::string_view name) const {
  auto it = sections_.find(name);
  return it == sections_.end() ? empty_ : it->second;
}

}  // namespace msdc
