#include "pcbench/serve.hpp"

#include "pcbench/error.hpp"

namespace pcbench {

namespace {

wire::Json info_json(const StepInfo& info) {
  return {{"step", info.step},
          {"raw_state", wire::vector_json(info.raw_state)},
          {"raw_measured", wire::vector_json(info.raw_measured)},
          {"constraint_g", wire::vector_json(info.constraint_g)},
          {"any_violation", info.any_violation},
          {"disturbance_applied", wire::vector_json(info.disturbance_applied)},
          {"action_applied", wire::vector_json(info.action_applied)}};
}

void send_error(LineChannel& ch, ErrorCode code, const std::string& message) {
  ch.send(wire::encode({{"type", "error"}, {"code", std::string(to_string(code))}, {"message", message}}));
}

}  // namespace

std::size_t serve(const EnvConfig& config, LineChannel& channel, const ServeOptions& options) {
  Environment env(config);
  const EnvConfig& cfg = env.config();
  channel.send(wire::encode({{"type", "hello"},
                             {"protocol", 1},
                             {"role", "env"},
                             {"env", cfg.name},
                             {"model", cfg.model.name},
                             {"obs_dim", env.observation_size()},
                             {"act_dim", env.action_size()},
                             {"T", cfg.steps},
                             {"a_low", wire::vector_json(cfg.a_space.low)},
                             {"a_high", wire::vector_json(cfg.a_space.high)},
                             {"o_low", wire::vector_json(cfg.observation_space().low)},
                             {"o_high", wire::vector_json(cfg.observation_space().high)},
                             {"obs_names", cfg.observation_names()},
                             {"act_names", cfg.model.input_names}}));

  bool ready = false;
  bool active = false;
  double episode_return = 0.0;
  std::size_t completed = 0;
  for (;;) {
    std::string line;
    try {
      line = channel.receive(options.idle_timeout);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::protocol) return completed;  // trainer went away
      throw;
    }
    wire::Json msg;
    try {
      msg = wire::decode_any(line);
    } catch (const Error& e) {
      send_error(channel, e.code(), e.what());
      continue;
    }
    const std::string type = msg["type"].get<std::string>();
    if (type == "close") return completed;
    if (type == "ready") {
      for (const auto& [key, expected] :
           {std::pair{"obs_dim", env.observation_size()}, std::pair{"act_dim", env.action_size()}}) {
        if (msg.contains(key) && (!msg[key].is_number_integer() || msg[key].get<Eigen::Index>() != expected)) {
          send_error(channel, ErrorCode::protocol,
                     std::string("handshake ") + key + " does not match " + std::to_string(expected) + ": '" + line + "'");
          return completed;
        }
      }
      ready = true;
      continue;
    }
    if (!ready) {
      send_error(channel, ErrorCode::protocol, "expected 'ready' first, got: '" + line + "'");
      continue;
    }
    try {
      if (type == "reset") {
        std::optional<std::uint64_t> seed;
        if (msg.contains("seed") && !msg["seed"].is_null()) {
          if (!msg["seed"].is_number_integer()) fail(ErrorCode::protocol, "seed must be an integer: '" + line + "'");
          seed = msg["seed"].get<std::uint64_t>();
        }
        const ResetResult r = env.reset(seed);
        active = true;
        episode_return = 0.0;
        wire::Json reply = {{"type", "reset"}, {"observation", wire::vector_json(r.observation)}, {"info", info_json(r.info)}};
        reply["seed"] = seed ? wire::Json(*seed) : wire::Json(nullptr);
        channel.send(wire::encode(reply));
      } else if (type == "act") {
        if (!active) fail(ErrorCode::episode_complete, "no active episode; send reset first");
        const Vector u = wire::read_vector(msg, "action", env.action_size(), line);
        const StepResult r = env.step(u);
        episode_return += r.reward;
        channel.send(wire::encode({{"type", "obs"},
                                   {"t", env.step_index()},
                                   {"observation", wire::vector_json(r.observation)},
                                   {"reward", r.reward},
                                   {"terminated", r.terminated},
                                   {"truncated", r.truncated},
                                   {"info", info_json(r.info)}}));
        if (r.truncated) {
          active = false;
          ++completed;
          channel.send(wire::encode({{"type", "end"}, {"return", episode_return}}));
        }
      } else {
        fail(ErrorCode::protocol, "unknown message type: '" + line + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::integration || e.code() == ErrorCode::hook) active = false;
      send_error(channel, e.code(), e.what());
    }
  }
}

}  // namespace pcbench
