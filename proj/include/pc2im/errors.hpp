#pragma once

#include <stdexcept>
#include <string>

namespace pc2im {

// Single exception type for the whole simulator. `kind` maps 1:1 onto the
// C API status codes and the CLI exit-code classes.
class SimError : public std::runtime_error {
 public:
  enum class Kind {
    InvalidArgument,
    Parse,
    Io,
    Capacity,
    Config,
    Verification,
  };

  SimError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw SimError(SimError::Kind::InvalidArgument, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) {
  throw SimError(SimError::Kind::Parse, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw SimError(SimError::Kind::Io, msg);
}
[[noreturn]] inline void throw_capacity(const std::string& msg) {
  throw SimError(SimError::Kind::Capacity, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw SimError(SimError::Kind::Config, msg);
}

}  // namespace pc2im
