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

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tailnoise/backends.h"
#include "tailnoise/socket_util.h"

namespace tailnoise {

// Echo wire format: 4-byte big-endian payload length, then the payload.
// The server answers every message with the single byte kEchoAck.
inline constexpr std::byte kEchoAck{0x06};
inline constexpr std::size_t kEchoMaxPayload = 16u << 20;

std::string EncodeEchoFrame(std::string_view payload);

// Loopback round-trip server. One thread per connection.
class EchoServer {
 public:
  EchoServer(const Endpoint& listen, int64_t reply_delay_ns = 0);
  ~EchoServer();
  EchoServer(const EchoServer&) = delete;
  EchoServer& operator=(const EchoServer&) = delete;

  uint16_t port() const { return listener_.port(); }
  Endpoint endpoint() const;
  uint64_t messages_served() const { return messages_.load(std::memory_order_acquire); }
  uint64_t connection_errors() const { return errors_.load(std::memory_order_relaxed); }

  // Stops accepting, closes every connection and joins all threads.
  void Stop();

 private:
  void AcceptLoop();
  void Serve(int fd);

  Endpoint requested_;
  Listener listener_;
  int64_t reply_delay_ns_;
  std::atomic<bool> stopping_{false};
  std::atomic<uint64_t> messages_{0};
  std::atomic<uint64_t> errors_{0};
  std::mutex mu_;
  std::vector<int> open_fds_;
  std::vector<std::thread> connection_threads_;
  std::thread accept_thread_;
};

// Client side of the echo protocol. The payload is the request's SQL text
// when present, otherwise "<label> <first key>".
class EchoBackend final : public Backend {
 public:
  // Connects immediately. Throws BackendError if the server is unreachable.
  explicit EchoBackend(const Endpoint& server);

  // Transport failures come back as error responses. A broken connection is
  // re-dialed once on the following call.
  Response Execute(const Request& request) override;
  Response ExecutePayload(std::string_view payload);
  BackendCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return "echo"; }

 private:
  Endpoint server_;
  Socket socket_;
  std::string frame_;
};

}  // namespace tailnoise
