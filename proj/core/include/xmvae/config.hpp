#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace xmvae {

/// Flat key=value run configuration. Files are plain text, one pair per
/// line, '#' starts a comment. A resolved config written next to a run's
/// outputs reproduces the run exactly.
class RunConfig {
 public:
  void load_file(const std::string& path);

  /// Applies a "key=value" override.
  void set_pair(const std::string& pair);
  void set(const std::string& key, const std::string& value);

  /// Inserts a default for keys not set yet.
  void set_default(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return kv_.contains(key); }

  std::string get_string(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_seed(const std::string& key) const;

  /// Comma-separated list of reals; "start:step:end" expands to an
  /// inclusive grid.
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  /// Rejects keys outside the allowed set (catches typos in configs).
  void require_known_keys(const std::vector<std::string>& allowed) const;

  /// Writes keys in sorted order.
  void write(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace xmvae
