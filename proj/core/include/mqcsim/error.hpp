#pragma once

#include <stdexcept>
#include <string>

namespace mqcsim {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  invalid_argument,  // caller passed values outside an operation's domain
  config,            // malformed or incomplete run configuration
  resource_cap,      // system size beyond the configured dimension cap
  invariant,         // an internal consistency check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

}  // namespace mqcsim
