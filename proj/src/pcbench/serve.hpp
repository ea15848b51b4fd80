#pragma once

#include <chrono>

#include "pcbench/env.hpp"
#include "pcbench/wire.hpp"

namespace pcbench {

struct ServeOptions {
  std::chrono::milliseconds idle_timeout{std::chrono::hours(24)};
};

/// Serves one environment to a driving trainer over `channel`, roles reversed
/// relative to external policies:
///   engine  -> hello {env, obs_dim, act_dim, T, a_low, a_high, o_low, o_high, obs_names, act_names}
///   trainer -> ready
///   trainer -> reset {seed?}          engine -> reset {seed, observation, info}
///   trainer -> act {action}           engine -> obs {t, observation, reward, terminated, truncated, info}
///                                     (after the last step also end {return})
///   trainer -> close, or end of stream, stops the loop.
/// Bad requests are answered with error {code, message} and the loop continues.
/// Returns the number of completed episodes.
std::size_t serve(const EnvConfig& config, LineChannel& channel, const ServeOptions& options = {});

}  // namespace pcbench
