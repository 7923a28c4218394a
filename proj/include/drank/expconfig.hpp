#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "drank/error.hpp"

namespace drank {

// Flat key=value experiment configuration. The key set is fixed per
// command; unknown keys are rejected. Precedence: defaults, then config
// file, then command-line overrides.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::map<std::string, std::string> defaults);

  // key=value lines; '#' starts a comment, blank lines ignored.
  void load_file(const std::string& path);

  void set(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> num_list(const std::string& key) const;

  // `command=<name>` followed by every resolved key, sorted.
  void write_manifest(std::ostream& out, const std::string& command) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string& lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace drank
