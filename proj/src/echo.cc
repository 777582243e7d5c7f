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

#include "tailnoise/echo.h"

#include <sys/socket.h>

#include <algorithm>
#include <array>
#include <iostream>

#include "tailnoise/clock.h"
#include "tailnoise/errors.h"

namespace tailnoise {

std::string EncodeEchoFrame(std::string_view payload) {
  std::string frame(4 + payload.size(), '\0');
  PutBigEndian32(reinterpret_cast<std::byte*>(frame.data()), static_cast<uint32_t>(payload.size()));
  std::copy(payload.begin(), payload.end(), frame.begin() + 4);
  return frame;
}

EchoServer::EchoServer(const Endpoint& listen, int64_t reply_delay_ns)
    : requested_(listen), listener_(listen), reply_delay_ns_(reply_delay_ns) {
  accept_thread_ = std::thread([this] { AcceptLoop(); });
}

EchoServer::~EchoServer() { Stop(); }

Endpoint EchoServer::endpoint() const {
  Endpoint ep = requested_;
  ep.port = port();
  if (ep.host.empty() || ep.host == "0.0.0.0") ep.host = "127.0.0.1";
  return ep;
}

void EchoServer::Stop() {
  if (stopping_.exchange(true)) return;
  listener_.Shutdown();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(connection_threads_);
  }
  for (auto& t : threads) t.join();
}

void EchoServer::AcceptLoop() {
  while (!stopping_.load()) {
    Socket conn = listener_.Accept();
    if (!conn.valid()) break;
    std::lock_guard lock(mu_);
    if (stopping_.load()) break;
    const int fd = conn.Release();
    open_fds_.push_back(fd);
    connection_threads_.emplace_back([this, fd] { Serve(fd); });
  }
}

void EchoServer::Serve(int fd) {
  TightenTimerSlack();
  Socket conn(fd);
  std::string payload;
  try {
    std::array<std::byte, 4> header;
    while (conn.RecvExact(header)) {
      const uint32_t len = GetBigEndian32(header.data());
      if (len > kEchoMaxPayload) {
        throw ProtocolError("echo message of " + std::to_string(len) + " bytes exceeds limit");
      }
      payload.resize(len);
      if (len > 0 && !conn.RecvExact(std::as_writable_bytes(std::span(payload.data(), payload.size())))) {
        throw IoError("client closed mid-frame");
      }
      if (reply_delay_ns_ > 0) WaitUntil(MonotonicNanos() + reply_delay_ns_, 0);
      // Counted before the ack so a client that saw the reply sees the count.
      messages_.fetch_add(1, std::memory_order_release);
      const std::byte ack = kEchoAck;
      conn.SendAll(std::span(&ack, 1));
    }
  } catch (const Error& e) {
    if (!stopping_.load()) {
      errors_.fetch_add(1, std::memory_order_relaxed);
      std::cerr << "echo server: connection dropped: " << e.what() << "\n";
    }
  }
  // Deregister before the descriptor is closed so Stop() never shuts down a
  // recycled fd number.
  std::lock_guard lock(mu_);
  std::erase(open_fds_, fd);
  conn.Close();
}

EchoBackend::EchoBackend(const Endpoint& server)
    : server_(server), socket_(Socket::Connect(server)) {}

Response EchoBackend::Execute(const Request& request) {
  if (request.sql_text) return ExecutePayload(*request.sql_text);
  std::string payload(request.txn.label());
  if (!request.keys.empty()) payload += " " + std::to_string(request.keys.front());
  return ExecutePayload(payload);
}

Response EchoBackend::ExecutePayload(std::string_view payload) {
  if (payload.size() > kEchoMaxPayload) return Response::Error("payload too large");
  try {
    if (!socket_.valid()) socket_ = Socket::Connect(server_);
    frame_.resize(4 + payload.size());
    PutBigEndian32(reinterpret_cast<std::byte*>(frame_.data()),
                   static_cast<uint32_t>(payload.size()));
    std::copy(payload.begin(), payload.end(), frame_.begin() + 4);
    socket_.SendAll(frame_);
    std::byte ack{};
    if (!socket_.RecvExact(std::span(&ack, 1))) throw IoError("server closed the connection");
    if (ack != kEchoAck) throw ProtocolError("unexpected echo reply byte");
  } catch (const Error& e) {
    socket_.Close();
    return Response::Error(e.what());
  }
  return Response{};
}

}  // namespace tailnoise
