#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcbench {

/// Failure categories. The C API maps each one to a distinct status code.
enum class ErrorCode {
  config,            // invalid scenario / environment configuration
  argument,          // bad call argument (dimension mismatch, degenerate bounds)
  out_of_range,      // index outside a schedule
  episode_complete,  // step() after truncation
  integration,       // non-finite state produced by the integrator
  undefined_output,  // derived quantity undefined at this state
  protocol,          // malformed or missing wire message
  timeout,           // external agent did not answer in time
  hook,              // custom reward returned a non-finite value
  solver,            // oracle could not produce a usable iterate
  io,
  internal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the integrator; carries the substep that produced the first non-finite value.
class IntegrationError : public Error {
 public:
  IntegrationError(std::size_t substep, const std::string& what)
      : Error(ErrorCode::integration, what), substep_(substep) {}
  std::size_t substep() const noexcept { return substep_; }

 private:
  std::size_t substep_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

/// Configuration error naming the offending field.
[[noreturn]] void config_error(std::string_view field, const std::string& message);

}  // namespace pcbench
