#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "imprelay/sim_engine.hpp"

namespace imprelay {

/// Accepted configuration keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Layered configuration: built-in defaults, then a JSON document, then
/// individual key overrides. Later layers win regardless of call order
/// between files and overrides: overrides always beat file values.
class ConfigBuilder {
 public:
  ConfigBuilder();

  /// Merges a JSON object. Unknown keys throw ConfigError.
  void merge_json_text(std::string_view text);
  void merge_file(const std::filesystem::path& path);

  /// `value` is parsed according to the key's type ("null" clears lambda_rd).
  void set(std::string_view key, std::string_view value);

  /// Effective, validated configuration.
  SimulationConfig build() const;

  /// Effective key/value document (defaults filled), pretty-printed JSON.
  std::string effective_json() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Round trip of a built config into the canonical document.
std::string config_to_json(const SimulationConfig& config);

}  // namespace imprelay
