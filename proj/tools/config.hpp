#pragma once

// Flat run configuration: a JSON object whose keys are dotted names grouped
// by module (grid.*, kernel.*, quad.*, evolution.*, initial.*, verify.*).
// Missing keys take the defaults from config_reference().

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlfilt/evolution.hpp"
#include "nlfilt/initial_data.hpp"
#include "nlfilt/report.hpp"

namespace nlfilt::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KeyInfo {
  std::string key;
  json default_value;
  std::string help;
};

const std::vector<KeyInfo>& config_reference();

class Config {
 public:
  /// Defaults only.
  Config();
  /// Parses and validates; errors carry "source:line: key: message".
  static Config parse(const std::string& text, const std::string& source);
  static Config load(const std::string& path);

  /// Complete flat snapshot, every key present, in reference order.
  const json& values() const noexcept { return values_; }

  /// Overrides a numeric key (used by sweeps and --seed) and revalidates.
  void set_number(const std::string& key, double value);
  bool is_numeric_key(const std::string& key) const;

  std::uint64_t seed() const;
  GridSpec grid() const;
  KernelSpec kernel() const;
  QuadratureConfig quad() const;
  EvolutionConfig evolution() const;
  InitialData initial() const;

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

 private:
  void validate() const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  json values_;
  std::string source_ = "<defaults>";
  std::string text_;
};

/// Markdown table of every key, its default and meaning.
std::string defaults_reference_markdown();

}  // namespace nlfilt::cli
