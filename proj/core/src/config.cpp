#include "xmvae/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "xmvae/error.hpp"

namespace xmvae {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    kv_[key] = value;
  }
}

void RunConfig::set_pair(const std::string& pair) {
  const auto eq = pair.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidArgument("override must be key=value, got '" + pair + "'");
  }
  set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

void RunConfig::set_default(const std::string& key, const std::string& value) {
  kv_.emplace(key, value);
}

std::string RunConfig::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw InvalidArgument("missing config key '" + key + "'");
  return it->second;
}

double RunConfig::get_real(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "' is not a real: '" + v + "'");
  }
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "' is not an integer: '" + v + "'");
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidArgument("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::uint64_t RunConfig::get_seed(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "' is not a seed: '" + v + "'");
  }
}

std::vector<double> RunConfig::get_real_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  const auto colon = v.find(':');
  try {
    if (colon != std::string::npos) {
      // start:step:end inclusive grid
      const auto colon2 = v.find(':', colon + 1);
      if (colon2 == std::string::npos) throw std::invalid_argument(v);
      const double start = std::stod(v.substr(0, colon));
      const double step = std::stod(v.substr(colon + 1, colon2 - colon - 1));
      const double end = std::stod(v.substr(colon2 + 1));
      if (step <= 0.0 || end < start) throw std::invalid_argument(v);
      const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
      return out;
    }
    std::size_t pos = 0;
    while (pos <= v.size()) {
      auto comma = v.find(',', pos);
      if (comma == std::string::npos) comma = v.size();
      const std::string item = trim(v.substr(pos, comma - pos));
      if (item.empty()) throw std::invalid_argument(v);
      out.push_back(std::stod(item));
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "' is not a real list: '" + v + "'");
  }
  return out;
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (double v : get_real_list(key)) {
    const auto i = static_cast<std::int64_t>(std::llround(v));
    if (static_cast<double>(i) != v) {
      throw InvalidArgument("config key '" + key + "' must contain integers");
    }
    out.push_back(i);
  }
  return out;
}

void RunConfig::require_known_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : kv_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
}

void RunConfig::write(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open config for writing: " + path);
  for (const auto& [key, value] : kv_) {
    out << key << '=' << value << '\n';
  }
  if (!out) throw IoError("config write failed: " + path);
}

}  // namespace xmvae
