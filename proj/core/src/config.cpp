#include "inrsep/config.hpp"

#include <fstream>
#include <sstream>

namespace inrsep::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError(IoError::Kind::kOpenFailed, "cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DataError("config line " + std::to_string(lineno) + ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

void Config::set(const std::string& key, std::string value) { kv_[key] = std::move(value); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw DataError("config key '" + key + "': not a number: " + it->second);
  }
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    throw DataError("config key '" + key + "': not an unsigned integer: " + it->second);
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw DataError("config key '" + key + "': not an unsigned integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw DataError("config key '" + key + "': not a boolean: " + it->second);
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& piece : split_commas(it->second)) {
    try {
      out.push_back(std::stod(piece));
    } catch (const std::exception&) {
      throw DataError("config key '" + key + "': not a number list: " + it->second);
    }
  }
  return out;
}

std::vector<std::size_t> Config::get_sizes(const std::string& key,
                                           const std::vector<std::size_t>& fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<std::size_t> out;
  for (const std::string& piece : split_commas(it->second)) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(piece)));
    } catch (const std::exception&) {
      throw DataError("config key '" + key + "': not an integer list: " + it->second);
    }
  }
  return out;
}

}  // namespace inrsep::io
