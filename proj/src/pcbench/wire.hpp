#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pcbench/types.hpp"

namespace pcbench {

/// Newline-delimited text transport. Receive blocks up to the timeout.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send(const std::string& line) = 0;
  /// Throws ErrorCode::timeout when nothing arrives in time and ErrorCode::protocol
  /// when the peer closed the stream.
  virtual std::string receive(std::chrono::milliseconds timeout) = 0;
  virtual bool alive() const = 0;
};

/// Channel over a pair of file descriptors (not owned unless `owns` is set).
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd, bool owns = false);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void send(const std::string& line) override;
  std::string receive(std::chrono::milliseconds timeout) override;
  bool alive() const override { return !closed_; }

 protected:
  void close_fds();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  bool closed_ = false;
  std::string buffer_;
};

/// Runs `/bin/sh -c command` with its stdin/stdout connected to the channel.
/// The child is terminated when the channel is destroyed.
std::unique_ptr<LineChannel> spawn_process(const std::string& command);

/// Connects to host:port.
std::unique_ptr<LineChannel> connect_tcp(const std::string& host, std::uint16_t port,
                                         std::chrono::milliseconds timeout);

/// Listens on port (0 picks a free one), accepts a single connection.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<LineChannel> accept(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

namespace wire {

using Json = nlohmann::json;

/// Serializes a message on one line; floating-point numbers carry 17 significant digits.
std::string encode(const Json& message);

/// Parses one line and checks its "type". Throws ErrorCode::protocol quoting the payload.
Json decode(const std::string& line, std::string_view expected_type);
Json decode_any(const std::string& line);

Json vector_json(const Vector& v);
/// Reads a numeric array field; `expected` < 0 accepts any length.
Vector read_vector(const Json& msg, std::string_view key, Eigen::Index expected, const std::string& payload);

}  // namespace wire

}  // namespace pcbench
