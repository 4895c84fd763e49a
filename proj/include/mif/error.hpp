#pragma once

#include <stdexcept>
#include <string>

namespace mif {

// Raised for out-of-domain arguments: p outside (0,1), k = 0, vertex out of
// range, malformed graph files and the like.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mif
