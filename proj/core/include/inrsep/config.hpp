#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inrsep/errors.hpp"

namespace inrsep::io {

// Flat key = value configuration file. '#' starts a comment, blank lines
// are skipped, keys are dotted lowercase. Values are parsed on access.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::size_t> get_sizes(const std::string& key,
                                     const std::vector<std::size_t>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace inrsep::io
