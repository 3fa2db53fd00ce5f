#pragma once

// Flat "key = value" run configuration.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One key per line, '#' starts a comment. Keys are case-sensitive; later
/// assignments override earlier ones.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");
  /// The "config.<key>" entries of a run manifest, prefix removed.
  static Config from_manifest(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Applies "key=value".
  void set_assignment(const std::string& assignment);
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  /// Comma- or whitespace-separated reals.
  std::vector<double> get_doubles(const std::string& key) const;
  /// Semicolon-separated items (modulus specs contain commas).
  std::vector<std::string> get_list(const std::string& key) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  /// Sorted "key = value" lines; input to the hash.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
  std::string hash_hex() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace dwlab
