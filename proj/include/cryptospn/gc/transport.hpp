#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

namespace cryptospn {

/// Reliable ordered byte stream. Failures raise ProtocolError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const std::uint8_t* data, std::size_t n) = 0;
  virtual void recv(std::uint8_t* data, std::size_t n) = 0;
  virtual void close() = 0;
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> memory_pipe();

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Parses "host:port", "[v6]:port" or ":port"; throws InputError.
  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& endpoint);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  /// Bound port, useful when listening on port 0.
  std::uint16_t port() const { return port_; }
  std::unique_ptr<Transport> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Connects, retrying refused connections until `timeout` expires.
std::unique_ptr<Transport> tcp_connect(const Endpoint& endpoint,
                                       std::chrono::milliseconds timeout = std::chrono::seconds(10));

}  // namespace cryptospn
