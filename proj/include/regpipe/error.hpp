#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regpipe {

// Base for every error raised by the library. `kind_name()` is the stable
// machine-readable error kind (e.g. "DuplicateClauseId").
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual std::string_view kind_name() const noexcept = 0;
};

// Module errors carry a module-local kind enum. Each module specializes
// `error_kind_name` for its enum.
template <typename Kind>
std::string_view error_kind_name(Kind kind) noexcept;

template <typename Kind>
class KindedError : public Error {
 public:
  KindedError(Kind kind, const std::string& message)
      : Error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept override { return error_kind_name(kind_); }

 private:
  Kind kind_;
};

}  // namespace regpipe
