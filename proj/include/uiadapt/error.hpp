#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uiadapt {

/// Machine-readable failure categories. The CLI and the HTTP service report
/// these names verbatim.
enum class ErrorKind {
  Domain,
  Range,
  Config,
  Contract,
  Model,
  EmptyInput,
  EpisodeFinished,
  SessionFinished,
  NotFound,
  Validation,
  Divergence,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view category() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace uiadapt
