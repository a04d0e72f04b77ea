#include "lanc/error.hpp"

namespace lanc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::InfeasibleDegree: return "InfeasibleDegree";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::EmptyBuffer: return "EmptyBuffer";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DisconnectedTopology: return "DisconnectedTopology";
    case ErrorCode::DegenerateTopology: return "DegenerateTopology";
    case ErrorCode::NoFinishedPeers: return "NoFinishedPeers";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace lanc
