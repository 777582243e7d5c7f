// Copyright 2026 The tailnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tailnoise {

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;

  std::string ToString() const { return host + ":" + std::to_string(port); }
};

// "host:port", "[v6addr]:port" or ":port" (loopback). Throws ParseError.
Endpoint ParseEndpoint(std::string_view text);

// Owning wrapper around a connected stream socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { Close(); }
  Socket(Socket&& other) noexcept : fd_(other.Release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  // Resolves and connects with TCP_NODELAY set. Throws BackendError.
  static Socket Connect(const Endpoint& endpoint);

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  // Throw IoError on failure or a peer that closed early.
  void SendAll(std::span<const std::byte> data);
  void SendAll(std::string_view data) {
    SendAll(std::as_bytes(std::span(data.data(), data.size())));
  }
  // Returns false on a clean EOF before the first byte.
  bool RecvExact(std::span<std::byte> out);

  void ShutdownBoth();
  void Close();
  int Release();

 private:
  int fd_ = -1;
};

// Bound, listening TCP socket.
class Listener {
 public:
  // Throws BackendError if the address cannot be bound.
  explicit Listener(const Endpoint& endpoint, int backlog = 128);

  uint16_t port() const { return port_; }
  // Returns an invalid Socket once the listener has been shut down.
  Socket Accept();
  void Shutdown();

 private:
  Socket socket_;
  uint16_t port_ = 0;
};

void PutBigEndian32(std::byte* out, uint32_t v);
uint32_t GetBigEndian32(const std::byte* in);

}  // namespace tailnoise
