#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scapegeom {

enum class ErrorKind {
  kDimensionMismatch,
  kNonOrthonormalRotation,
  kOutOfRangeValue,
  kEmptyOverlap,
  kNegativeDepth,
  kTimestepOutOfRange,
  kNonDivisibleFactor,
  kGeneratorFailure,
  kCorruptManifest,
  kMissingFile,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure in the library surfaces as this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Result of validate(): either ok, or the first violated invariant.
struct Status {
  bool ok = true;
  ErrorKind kind = ErrorKind::kOutOfRangeValue;
  std::string message;

  static Status Ok() { return {}; }
  static Status Fail(ErrorKind k, std::string msg) { return {false, k, std::move(msg)}; }

  explicit operator bool() const noexcept { return ok; }
  bool operator==(const Status&) const = default;

  void throw_if_error() const {
    if (!ok) throw Error(kind, message);
  }
};

}  // namespace scapegeom
