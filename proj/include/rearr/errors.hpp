#pragma once

#include <stdexcept>
#include <string>

namespace rearr {

// Error categories, mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  domain = 1,        // argument outside its mathematical domain
  shape = 2,         // incompatible grids or window geometry
  precondition = 3,  // runtime precondition on the data failed
  config = 4,        // bad configuration value or file
  numeric = 5,       // quadrature / iteration failed to converge
  io = 6,            // file read or write failed
  unsupported = 7,   // valid request outside the implemented scope
  gate = 8,          // experiment acceptance gate failed
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::domain, w) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(ErrorCode::shape, w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w)
      : Error(ErrorCode::precondition, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorCode::numeric, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& w)
      : Error(ErrorCode::unsupported, w) {}
};

}  // namespace rearr
