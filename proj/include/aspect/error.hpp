#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aspect {

enum class ErrorKind {
  // corpus records
  MalformedRecord,
  DuplicateId,
  TooManyAspectTerms,
  UnknownLanguage,
  InvalidRecord,
  // arguments and preconditions
  InvalidArgument,
  EmptyInput,
  DimensionMismatch,
  ZeroVector,
  MissingPredictions,
  IdMismatch,
  NoGoldLabels,
  LanguageMismatch,
  InvalidSimilarity,
  // llm responses
  ParseFailure,
  UnknownPolarity,
  // i/o and remote services
  Io,
  Transport,
  RemoteDimension,
  RemoteRejected,
  SchemaMismatch,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind. `line` is set for errors that
/// point at a 1-based input line; `retryable` marks transient transport faults.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt, bool retryable = false);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
  bool retryable_;
};

/// Process exit code for an error: 1 for validation problems, 2 for I/O or
/// transport problems.
int exit_code_for(ErrorKind kind);

}  // namespace aspect
