#include "aspect/error.hpp"

namespace aspect {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "malformed record";
    case ErrorKind::DuplicateId: return "duplicate id";
    case ErrorKind::TooManyAspectTerms: return "too many aspect terms";
    case ErrorKind::UnknownLanguage: return "unknown language";
    case ErrorKind::InvalidRecord: return "invalid record";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::ZeroVector: return "zero vector";
    case ErrorKind::MissingPredictions: return "missing predictions";
    case ErrorKind::IdMismatch: return "id mismatch";
    case ErrorKind::NoGoldLabels: return "no gold labels";
    case ErrorKind::LanguageMismatch: return "language mismatch";
    case ErrorKind::InvalidSimilarity: return "invalid similarity";
    case ErrorKind::ParseFailure: return "parse failure";
    case ErrorKind::UnknownPolarity: return "unknown polarity";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Transport: return "transport failure";
    case ErrorKind::RemoteDimension: return "remote dimension mismatch";
    case ErrorKind::RemoteRejected: return "remote rejected request";
    case ErrorKind::SchemaMismatch: return "schema mismatch";
  }
  return "unknown error";
}

namespace {

std::string decorate(const std::string& message, std::optional<std::size_t> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line, bool retryable)
    : std::runtime_error(decorate(message, line)),
      kind_(kind),
      line_(line),
      retryable_(retryable) {}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Transport:
    case ErrorKind::RemoteDimension:
    case ErrorKind::RemoteRejected:
      return 2;
    default:
      return 1;
  }
}

}  // namespace aspect
