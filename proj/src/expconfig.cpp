#include "drank/expconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace drank {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig::ExperimentConfig(std::map<std::string, std::string> defaults)
    : values_(std::move(defaults)) {}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DrError(Err::BadConfig, "cannot open config file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DrError(Err::BadConfig, path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw DrError(Err::BadConfig, "unknown config key '" + key + "'");
  it->second = value;
}

const std::string& ExperimentConfig::lookup(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw DrError(Err::BadConfig, "missing config key '" + key + "'");
  return it->second;
}

const std::string& ExperimentConfig::str(const std::string& key) const {
  return lookup(key);
}

double ExperimentConfig::num(const std::string& key) const {
  const std::string& v = lookup(key);
  char* end = nullptr;
  const double parsed = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw DrError(Err::BadConfig, "key '" + key + "' is not a number: " + v);
  return parsed;
}

long long ExperimentConfig::integer(const std::string& key) const {
  const std::string& v = lookup(key);
  char* end = nullptr;
  const long long parsed = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw DrError(Err::BadConfig, "key '" + key + "' is not an integer: " + v);
  return parsed;
}

std::uint64_t ExperimentConfig::u64(const std::string& key) const {
  const std::string& v = lookup(key);
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw DrError(Err::BadConfig, "key '" + key + "' is not an integer: " + v);
  return parsed;
}

bool ExperimentConfig::flag(const std::string& key) const {
  const std::string& v = lookup(key);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw DrError(Err::BadConfig, "key '" + key + "' is not a flag: " + v);
}

std::vector<double> ExperimentConfig::num_list(const std::string& key) const {
  const std::string& v = lookup(key);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double parsed = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw DrError(Err::BadConfig,
                    "key '" + key + "' has a non-numeric entry: " + item);
    out.push_back(parsed);
  }
  if (out.empty())
    throw DrError(Err::BadConfig, "key '" + key + "' lists no values");
  return out;
}

void ExperimentConfig::write_manifest(std::ostream& out,
                                      const std::string& command) const {
  out << "command=" << command << "\n";
  for (const auto& [key, value] : values_) out << key << '=' << value << "\n";
}

}  // namespace drank
