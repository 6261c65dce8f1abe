#pragma once

#include <stdexcept>
#include <string>

namespace mtp {

// Error categories shared by the C API status codes and the CLI exit codes.
enum class ErrorCode : int {
  ok = 0,
  config = 1,  // bad configuration / usage
  data = 2,    // bad input data
  numeric = 3, // numerical failure (singular solve, failed replicates, ...)
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorCode::data, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

} // namespace mtp
