#pragma once

#include <stdexcept>
#include <string>

namespace glmb {

/// Raised for violated preconditions and numerically degenerate states.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glmb
