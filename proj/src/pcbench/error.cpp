#include "pcbench/error.hpp"

namespace pcbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::argument: return "argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::episode_complete: return "episode_complete";
    case ErrorCode::integration: return "integration";
    case ErrorCode::undefined_output: return "undefined_output";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::hook: return "hook";
    case ErrorCode::solver: return "solver";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

void config_error(std::string_view field, const std::string& message) {
  throw Error(ErrorCode::config, "invalid field '" + std::string(field) + "': " + message);
}

}  // namespace pcbench
