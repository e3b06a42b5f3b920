#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace btm {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Flat key=value configuration. Every key is registered with a default;
/// unknown keys are rejected with the offending line number.
class ToolkitConfig {
 public:
  ToolkitConfig();  // defaults only

  static ToolkitConfig load(const std::filesystem::path& path);

  /// Parses "key=value" lines; '#' starts a comment.
  void parse_text(const std::string& text, const std::string& source_name);

  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  static const std::vector<ConfigKey>& registry();

  /// Serialized key=value form, keys in registry order.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace btm
