#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hanbias::cli {

/// Machine-readable run record: flat key/value JSON with the configuration,
/// input content digests, produced files, and per-stage timings. Saving
/// fails if a listed output does not exist.
class Manifest {
 public:
  explicit Manifest(std::string_view command);

  void set(std::string_view key, std::string_view value);
  void set(std::string_view key, const char* value);
  void set(std::string_view key, bool value);
  void set(std::string_view key, std::int64_t value);
  void set(std::string_view key, std::uint64_t value);
  void set(std::string_view key, double value);

  /// Records input.<label>.path and input.<label>.digest (content hash).
  void add_input(std::string_view label, const std::string& path);
  /// Records output.<label> = path; existence is checked by save().
  void add_output(std::string_view label, const std::string& path);
  /// Records timing.<stage>_seconds.
  void add_timing(std::string_view stage, double seconds);

  void save(const std::string& path) const;

 private:
  nlohmann::ordered_json doc_;
  std::vector<std::pair<std::string, std::string>> outputs_;  // label, path
};

}  // namespace hanbias::cli
