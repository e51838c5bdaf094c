#pragma once

#include <stdexcept>
#include <string>

namespace maxp1 {

/// File-system and format failures; mapped to a dedicated exit code by tools.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maxp1
