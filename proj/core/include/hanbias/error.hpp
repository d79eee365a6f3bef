#pragma once

#include <stdexcept>
#include <string>

namespace hanbias {

/// Error type thrown by all library operations. The message is a single line
/// so the CLI can forward it verbatim to the diagnostic stream.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hanbias
