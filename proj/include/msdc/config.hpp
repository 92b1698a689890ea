#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msdc {

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// One `[name]` block of a key=value config file.
class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, std::string source);

  const std::string& name() const { return name_; }
  bool has(std::string_view key) const;
  void set(const std::string& key, std::string value, int line);

  /// Throws ConfigError naming any key not in `allowed`, with its line number.
  void reject_unknown(std::initializer_list<std::string_view> allowed) const;

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::vector<double> get_double_list(std::string_view key) const;

  double get_double_or(std::string_view key, double fallback) const;
  std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const;
  std::string get_string_or(std::string_view key, std::string fallback) const;

  const std::map<std::string, ConfigEntry, std::less<>>& entries() const { return entries_; }

 private:
  const ConfigEntry& entry(std::string_view key) const;
  [[noreturn]] void fail(const ConfigEntry& e, std::string_view key, std::string_view msg) const;

  std::string name_;
  std::string source_;
  std::map<std::string, ConfigEntry, std::less<>> entries_;
};

/// Flat INI-style configuration: `[section]` headers, `key = value` lines,
/// `#` and `;` comments. Only the sections listed in kSections are accepted.
class RunConfig {
 public:
  static constexpr std::string_view kSections[] = {"model", "simulation", "stability",
                                                   "identification", "noise"};

  static RunConfig parse(std::istream& in, std::string source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  bool has_section(std::string_view name) const;
  const ConfigSection& section(std::string_view name) const;
  /// Empty section when absent, so optional sections read as all-defaults.
  const ConfigSection& section_or_empty(std::string_view name) const;

  const std::string& source() const { return source_; }
  /// Directory the config was loaded from; relative file keys resolve against it.
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::string, ConfigSection, std::less<>> sections_;
  ConfigSection empty_;
};

}  // namespace msdc
