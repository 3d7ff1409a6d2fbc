#pragma once

#include <stdexcept>
#include <string>

namespace gothen {

/// Rejected input: violated precondition, malformed config, band limit.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// I/O and file-format failures.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gothen
