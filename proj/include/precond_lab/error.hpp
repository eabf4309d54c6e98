#pragma once

#include <stdexcept>
#include <string>

namespace precond_lab {

enum class ErrorCode {
    invalid_argument,
    io,
    parse,
    dimension_mismatch,
    numerical,
    not_positive_definite,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace precond_lab
