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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailnoise/backends.h"
#include "tailnoise/socket_util.h"

namespace tailnoise {

// Protocol 3.0 as sent in the startup packet.
inline constexpr uint32_t kPgProtocolVersion = 196608;

struct PgConnectOptions {
  Endpoint server{"127.0.0.1", 5432};
  std::string user = "postgres";
  std::string database = "postgres";
  // Used only if the server asks for a cleartext password.
  std::optional<std::string> password;
  // Sent as SET SESSION CHARACTERISTICS after login; empty to skip.
  std::string isolation = "serializable";
};

// Minimal frontend for the PostgreSQL simple-query flow. Supports trust and
// cleartext-password authentication; no TLS, no extended protocol.
class PgConnection {
 public:
  // Runs the startup handshake until the first ReadyForQuery.
  // Throws BackendError when the server refuses the session and
  // ProtocolError on malformed replies.
  static PgConnection Connect(const PgConnectOptions& options);

  // Sends 'Q' and consumes messages up to ReadyForQuery. DataRow messages
  // are counted, not materialized. An ErrorResponse yields an error
  // Response carrying the server message. Throws ProtocolError or IoError
  // when the connection itself is unusable.
  Response SimpleQuery(std::string_view sql);

  const std::map<std::string, std::string>& parameters() const { return parameters_; }
  // Set when the isolation statement was rejected by the server.
  const std::optional<std::string>& isolation_warning() const { return isolation_warning_; }

 private:
  struct Message {
    char type = 0;
    std::string body;
  };

  explicit PgConnection(Socket socket) : socket_(std::move(socket)) {}
  Message ReadMessage();
  void HandleAsync(const Message& m);

  Socket socket_;
  std::map<std::string, std::string> parameters_;
  std::optional<std::string> isolation_warning_;
};

// Serialization helpers, exposed for fixture servers and tests.
std::string PgStartupMessage(std::string_view user, std::string_view database);
std::string PgQueryMessage(std::string_view sql);
std::string PgPasswordMessage(std::string_view password);
// Backend message: type byte, int32 length (self-inclusive), body.
std::string PgBackendMessage(char type, std::string_view body);
// "SEVERITY SQLSTATE: message" from an ErrorResponse body.
std::string PgErrorText(std::string_view body);

// Backend adapter over PgConnection. Requests must carry sql_text.
class PgBackend final : public Backend {
 public:
  explicit PgBackend(const PgConnectOptions& options)
      : connection_(PgConnection::Connect(options)) {}

  Response Execute(const Request& request) override;
  BackendCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return "sql"; }
  const PgConnection& connection() const { return connection_; }

 private:
  PgConnection connection_;
};

}  // namespace tailnoise
