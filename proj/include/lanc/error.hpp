#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lanc {

enum class ErrorCode {
  ZeroInverse,
  LengthMismatch,
  EmptyFile,
  EmptyInput,
  ShapeMismatch,
  DimensionMismatch,
  RankDeficient,
  ParseError,
  DisconnectedGraph,
  InfeasibleParameters,
  InfeasibleDegree,
  UnknownBlock,
  EmptyBuffer,
  ConfigError,
  DisconnectedTopology,
  DegenerateTopology,
  NoFinishedPeers,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace lanc
