#pragma once

#include <stdexcept>
#include <string>

namespace dps {

// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dps
