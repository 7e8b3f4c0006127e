#include "cryptospn/gc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "cryptospn/errors.hpp"

namespace cryptospn {
namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<std::uint8_t>> chunks;
  std::size_t head = 0;  // consumed bytes of chunks.front()
  bool closed = false;
};

class PipeEnd final : public Transport {
 public:
  PipeEnd(std::shared_ptr<Queue> out, std::shared_ptr<Queue> in) : out_(std::move(out)), in_(std::move(in)) {}
  ~PipeEnd() override { close(); }

  void send(const std::uint8_t* data, std::size_t n) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw ProtocolError("pipe closed");
    out_->chunks.emplace_back(data, data + n);
    out_->cv.notify_all();
  }

  void recv(std::uint8_t* data, std::size_t n) override {
    std::unique_lock lock(in_->mu);
    while (n > 0) {
      in_->cv.wait(lock, [&] { return !in_->chunks.empty() || in_->closed; });
      if (in_->chunks.empty()) throw ProtocolError("connection closed by peer");
      auto& front = in_->chunks.front();
      const std::size_t take = std::min(n, front.size() - in_->head);
      std::memcpy(data, front.data() + in_->head, take);
      data += take;
      n -= take;
      in_->head += take;
      if (in_->head == front.size()) {
        in_->chunks.pop_front();
        in_->head = 0;
      }
    }
  }

  void close() override {
    for (auto* q : {out_.get(), in_.get()}) {
      std::lock_guard lock(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Queue> out_, in_;
};

class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override { close(); }

  void send(const std::uint8_t* data, std::size_t n) override {
    while (n > 0) {
      const ssize_t k = ::send(fd_, data, n, MSG_NOSIGNAL);
      if (k < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
      }
      data += k;
      n -= static_cast<std::size_t>(k);
    }
  }

  void recv(std::uint8_t* data, std::size_t n) override {
    while (n > 0) {
      const ssize_t k = ::recv(fd_, data, n, 0);
      if (k == 0) throw ProtocolError("connection closed by peer");
      if (k < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("recv failed: ") + std::strerror(errno));
      }
      data += k;
      n -= static_cast<std::size_t>(k);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(ep.port);
  const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) throw ProtocolError("cannot resolve " + ep.to_string() + ": " + ::gai_strerror(rc));
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> memory_pipe() {
  auto a = std::make_shared<Queue>(), b = std::make_shared<Queue>();
  return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  std::string host, port;
  if (!text.empty() && text.front() == '[') {
    const auto close = text.find(']');
    if (close == std::string::npos || close + 1 >= text.size() || text[close + 1] != ':') {
      throw InputError("malformed address '" + text + "'");
    }
    host = text.substr(1, close - 1);
    port = text.substr(close + 2);
  } else {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw InputError("address '" + text + "' needs host:port");
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(port, &used);
    if (used != port.size() || v > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(v);
  } catch (const std::logic_error&) {
    throw InputError("invalid port in '" + text + "'");
  }
  ep.host = host.empty() ? "127.0.0.1" : host;
  return ep;
}

std::string Endpoint::to_string() const {
  return (host.find(':') != std::string::npos ? "[" + host + "]" : host) + ":" + std::to_string(port);
}

TcpListener::TcpListener(const Endpoint& endpoint) {
  AddrInfo ai;
  resolve(endpoint, true, ai);
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 8) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (fd_ < 0) throw ProtocolError("cannot listen on " + endpoint.to_string() + ": " + std::strerror(errno));
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                           : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpTransport>(fd);
    if (errno != EINTR) throw ProtocolError(std::string("accept failed: ") + std::strerror(errno));
  }
}

std::unique_ptr<Transport> tcp_connect(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    AddrInfo ai;
    resolve(endpoint, false, ai);
    int err = 0;
    for (addrinfo* p = ai.head; p; p = p->ai_next) {
      const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) return std::make_unique<TcpTransport>(fd);
      err = errno;
      ::close(fd);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw ProtocolError("cannot connect to " + endpoint.to_string() + ": " + std::strerror(err));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

}  // namespace cryptospn
