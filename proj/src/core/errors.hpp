#ifndef PTYCHO_ERRORS_HPP
#define PTYCHO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ptycho {

/// Error category carried by every exception thrown from this library.
/// The C API and the CLI map these onto status/exit codes.
enum class ErrorCode {
  invalid_argument,  // bad values passed to an operation (geometry, ranges)
  config,            // malformed or inconsistent configuration / input files
  numeric,           // a numerical routine failed (eigensolver, non-finite)
  io                 // filesystem read/write problems
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::invalid_argument, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCode::config, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorCode::numeric, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCode::io, msg);
}

}  // namespace ptycho

#endif
