#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppkg {

enum class ErrorCode {
  MalformedXml,
  DanglingEdge,
  DuplicateNodeId,
  DuplicateEdgeId,
  MalformedJson,
  EmptyGraph,
  MissingNode,
  RaggedDimensions,
  DegenerateInput,
  TooFewPoints,
  EmptyVocabulary,
  LengthMismatch,
  DuplicateCell,
  InvalidArgument,
  InvalidConfig,
  NoValidInputs,
  Io,
  BindFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by ppkg carries one of the codes above so callers
/// (the CLI, the HTTP service, tests) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ppkg
