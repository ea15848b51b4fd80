#include "pcbench/policy.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pcbench/error.hpp"

namespace pcbench {

ConstantPolicy::ConstantPolicy(Vector u, const Box& a_space) : u_(std::move(u)) {
  if (u_.size() != a_space.size()) {
    fail(ErrorCode::config, "constant policy needs " + std::to_string(a_space.size()) + " values, got " +
                                std::to_string(u_.size()));
  }
  if (!all_finite(u_) || !a_space.contains(u_)) {
    fail(ErrorCode::config, "constant action " + to_string(u_) + " outside the action space [" +
                                to_string(a_space.low) + ", " + to_string(a_space.high) + "]");
  }
}

std::string ConstantPolicy::label() const {
  std::string s = "constant:";
  for (Eigen::Index i = 0; i < u_.size(); ++i) {
    if (i) s += ",";
    s += format_double(u_[i]);
  }
  return s;
}

RandomPolicy::RandomPolicy(Box a_space) : a_space_(std::move(a_space)) {}

void RandomPolicy::reset(std::uint64_t seed, const Vector&, const Vector&) { rng_.seed(derive_seed(seed, 0x7a11d0)); }

Vector RandomPolicy::act(const PolicyInput&) {
  Vector u(a_space_.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = a_space_.low[i] + unit(rng_) * (a_space_.high[i] - a_space_.low[i]);
  }
  return u;
}

OraclePolicy::OraclePolicy(OcpSpec spec) : solver_(std::move(spec)) {}

void OraclePolicy::reset(std::uint64_t, const Vector&, const Vector&) {
  solver_.clear_warm_start();
  u_prev_.reset();
  diagnostics_.clear();
}

Vector OraclePolicy::act(const PolicyInput& input) {
  last_ = solver_.solve(input.step, input.raw_state, u_prev_);
  diagnostics_.push_back(last_.diagnostics);
  u_prev_ = last_.controls.front();
  return last_.controls.front();
}

ExternalPolicy::ExternalPolicy(ExternalSettings settings, const EnvConfig& env)
    : settings_(std::move(settings)),
      env_name_(env.name),
      steps_(env.steps),
      a_space_(env.a_space),
      o_space_(env.observation_space()) {
  if (settings_.target.empty()) fail(ErrorCode::config, "external policy needs a command or tcp:// address");
  if (settings_.timeout.count() <= 0) fail(ErrorCode::config, "external policy timeout must be positive");
}

template <class F>
auto ExternalPolicy::guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (...) {
    channel_.reset();  // a broken exchange leaves the stream in an unknown state
    throw;
  }
}

wire::Json ExternalPolicy::receive(std::string_view type) {
  return wire::decode(channel_->receive(settings_.timeout), type);
}

void ExternalPolicy::connect() {
  const std::string& t = settings_.target;
  if (t.rfind("tcp://", 0) == 0) {
    const std::string addr = t.substr(6);
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::config, "tcp address needs host:port: '" + t + "'");
    int port = 0;
    try {
      port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
      port = -1;
    }
    if (port <= 0 || port > 65535) fail(ErrorCode::config, "invalid port in '" + t + "'");
    channel_ = connect_tcp(addr.substr(0, colon), static_cast<std::uint16_t>(port), settings_.timeout);
  } else {
    channel_ = spawn_process(t);
  }
  wire::Json hello = {{"type", "hello"},
                      {"protocol", 1},
                      {"env", env_name_},
                      {"obs_dim", o_space_.size()},
                      {"act_dim", a_space_.size()},
                      {"T", steps_},
                      {"a_low", wire::vector_json(a_space_.low)},
                      {"a_high", wire::vector_json(a_space_.high)},
                      {"o_low", wire::vector_json(o_space_.low)},
                      {"o_high", wire::vector_json(o_space_.high)}};
  channel_->send(wire::encode(hello));
  std::string line;
  try {
    line = channel_->receive(settings_.timeout);
  } catch (const Error& e) {
    fail(e.code(), std::string("agent startup failed: ") + e.what());
  }
  const wire::Json ready = wire::decode(line, "ready");
  for (const auto& [key, expected] : {std::pair{"obs_dim", o_space_.size()}, std::pair{"act_dim", a_space_.size()}}) {
    if (!ready.contains(key) || !ready[key].is_number_integer() || ready[key].get<Eigen::Index>() != expected) {
      fail(ErrorCode::protocol, std::string("agent startup failed: handshake ") + key + " does not match " +
                                    std::to_string(expected) + ": '" + line + "'");
    }
  }
}

void ExternalPolicy::reset(std::uint64_t seed, const Vector& observation, const Vector&) {
  guarded([&] {
    if (!channel_ || !channel_->alive()) connect();
    channel_->send(wire::encode({{"type", "reset"}, {"seed", seed}, {"observation", wire::vector_json(observation)}}));
  });
}

Vector ExternalPolicy::act(const PolicyInput& input) {
  return guarded([&] {
    if (!channel_) fail(ErrorCode::protocol, "external policy used before reset");
    if (input.step > 0) {
      channel_->send(wire::encode({{"type", "obs"},
                                   {"t", input.step},
                                   {"observation", wire::vector_json(input.observation)},
                                   {"reward", input.last_reward}}));
    }
    const std::string line = channel_->receive(settings_.timeout);
    const wire::Json msg = wire::decode(line, "act");
    Vector u = wire::read_vector(msg, "action", a_space_.size(), line);
    if (!all_finite(u)) fail(ErrorCode::protocol, "non-finite action: '" + line + "'");
    return u;
  });
}

void ExternalPolicy::end_episode(const PolicyInput& final, double episode_return) {
  guarded([&] {
    if (!channel_) return;
    channel_->send(wire::encode({{"type", "obs"},
                                 {"t", final.step},
                                 {"observation", wire::vector_json(final.observation)},
                                 {"reward", final.last_reward}}));
    channel_->send(wire::encode({{"type", "end"}, {"return", episode_return}}));
  });
}

namespace {

Vector parse_values(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) fail(ErrorCode::config, "invalid number '" + item + "' in policy spec");
    vals.push_back(v);
  }
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

std::unique_ptr<Policy> make_policy(const std::string& spec, const EnvConfig& env, const PolicyOptions& options) {
  if (spec == "oracle") return std::make_unique<OraclePolicy>(make_ocp_spec(env, options.oracle));
  if (spec == "random") return std::make_unique<RandomPolicy>(env.a_space);
  if (spec.rfind("constant:", 0) == 0) return std::make_unique<ConstantPolicy>(parse_values(spec.substr(9)), env.a_space);
  if (spec.rfind("external:", 0) == 0) {
    return std::make_unique<ExternalPolicy>(ExternalSettings{spec.substr(9), options.timeout}, env);
  }
  fail(ErrorCode::config,
       "unknown policy '" + spec + "' (oracle, random, constant:<values>, external:<command|tcp://host:port>)");
}

void validate_policy_spec(const std::string& spec, const EnvConfig& env) {
  if (spec == "oracle" || spec == "random") return;
  if (spec.rfind("constant:", 0) == 0) {
    ConstantPolicy(parse_values(spec.substr(9)), env.a_space);
    return;
  }
  if (spec.rfind("external:", 0) == 0 && spec.size() > 9) return;
  fail(ErrorCode::config,
       "unknown policy '" + spec + "' (oracle, random, constant:<values>, external:<command|tcp://host:port>)");
}

}  // namespace pcbench
