#include "pcbench/wire.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "pcbench/error.hpp"

namespace pcbench {

namespace {

constexpr std::size_t max_line_bytes = 1 << 22;

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd, bool owns) : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {
  ignore_sigpipe();
}

FdChannel::~FdChannel() { close_fds(); }

void FdChannel::close_fds() {
  if (owns_) {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }
  read_fd_ = write_fd_ = -1;
  closed_ = true;
}

void FdChannel::send(const std::string& line) {
  if (closed_) fail(ErrorCode::protocol, "send on a closed channel");
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      closed_ = true;
      fail(ErrorCode::protocol, "peer closed the stream while sending: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string FdChannel::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    if (closed_) fail(ErrorCode::protocol, "peer closed the stream");
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      fail(ErrorCode::timeout, "no message within " + std::to_string(timeout.count()) + " ms");
    }
    pollfd p{read_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::io, "poll failed: " + errno_text());
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      closed_ = true;
      fail(ErrorCode::protocol, "read failed: " + errno_text());
    }
    if (n == 0) {
      closed_ = true;
      if (!buffer_.empty()) {
        fail(ErrorCode::protocol, "peer closed the stream mid-message: '" + buffer_ + "'");
      }
      fail(ErrorCode::protocol, "peer closed the stream");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
    if (buffer_.size() > max_line_bytes) fail(ErrorCode::protocol, "message exceeds size limit");
  }
}

namespace {

class ProcessChannel : public FdChannel {
 public:
  ProcessChannel(int read_fd, int write_fd, pid_t pid) : FdChannel(read_fd, write_fd, true), pid_(pid) {}
  ~ProcessChannel() override {
    close_fds();
    if (pid_ <= 0) return;
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

 private:
  pid_t pid_;
};

}  // namespace

std::unique_ptr<LineChannel> spawn_process(const std::string& command) {
  ignore_sigpipe();
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) fail(ErrorCode::io, "pipe: " + errno_text());
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    fail(ErrorCode::io, "pipe: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorCode::io, "fork: " + errno_text());
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  return std::make_unique<ProcessChannel>(from_child[0], to_child[1], pid);
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, std::uint16_t port,
                                         std::chrono::milliseconds timeout) {
  ignore_sigpipe();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    fail(ErrorCode::protocol, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int fd = -1;
  while (fd < 0) {
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
    }
    if (fd >= 0 || std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ::freeaddrinfo(res);
  if (fd < 0) fail(ErrorCode::timeout, "cannot connect to " + host + ":" + service);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<FdChannel>(fd, fd, true);
}

TcpListener::TcpListener(std::uint16_t port) {
  ignore_sigpipe();
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) fail(ErrorCode::io, "socket: " + errno_text());
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
    const std::string why = errno_text();
    ::close(fd_);
    fd_ = -1;
    fail(ErrorCode::io, "cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
  pollfd p{fd_, POLLIN, 0};
  const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (rc == 0) fail(ErrorCode::timeout, "no connection within " + std::to_string(timeout.count()) + " ms");
  if (rc < 0) fail(ErrorCode::io, "poll: " + errno_text());
  const int cfd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
  if (cfd < 0) fail(ErrorCode::io, "accept: " + errno_text());
  int one = 1;
  ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<FdChannel>(cfd, cfd, true);
}

namespace wire {

namespace {

void dump(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        dump(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out.push_back(',');
        dump(j[i], out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) fail(ErrorCode::protocol, "cannot encode non-finite number");
      out += format_double(v);
      break;
    }
    default: out += j.dump();
  }
}

}  // namespace

std::string encode(const Json& message) {
  std::string out;
  dump(message, out);
  return out;
}

Json decode_any(const std::string& line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorCode::protocol, "malformed message: '" + line + "'");
  if (!j.contains("type") || !j["type"].is_string()) {
    fail(ErrorCode::protocol, "message without a type: '" + line + "'");
  }
  return j;
}

Json decode(const std::string& line, std::string_view expected_type) {
  Json j = decode_any(line);
  if (j["type"].get<std::string>() != expected_type) {
    fail(ErrorCode::protocol, "expected '" + std::string(expected_type) + "' message, got: '" + line + "'");
  }
  return j;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector read_vector(const Json& msg, std::string_view key, Eigen::Index expected, const std::string& payload) {
  const std::string k(key);
  if (!msg.contains(k) || !msg[k].is_array()) {
    fail(ErrorCode::protocol, "message lacks array '" + k + "': '" + payload + "'");
  }
  const auto& a = msg[k];
  if (expected >= 0 && static_cast<Eigen::Index>(a.size()) != expected) {
    fail(ErrorCode::protocol, "'" + k + "' has " + std::to_string(a.size()) + " entries, expected " +
                                  std::to_string(expected) + ": '" + payload + "'");
  }
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) fail(ErrorCode::protocol, "non-numeric entry in '" + k + "': '" + payload + "'");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

}  // namespace wire

}  // namespace pcbench
