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

#include "tailnoise/pg_client.h"

#include <array>
#include <cctype>

#include "tailnoise/errors.h"

namespace tailnoise {

namespace {

constexpr uint32_t kMaxMessageLength = 1u << 30;

void AppendInt32(std::string& out, uint32_t v) {
  std::array<std::byte, 4> b;
  PutBigEndian32(b.data(), v);
  for (auto x : b) out.push_back(static_cast<char>(x));
}

void AppendCString(std::string& out, std::string_view s) {
  out.append(s);
  out.push_back('\0');
}

uint32_t ReadInt32(std::string_view body, std::size_t offset) {
  if (offset + 4 > body.size()) throw ProtocolError("truncated int32 field");
  return GetBigEndian32(reinterpret_cast<const std::byte*>(body.data() + offset));
}

// Splits a sequence of NUL-terminated strings.
std::vector<std::string_view> CStrings(std::string_view body) {
  std::vector<std::string_view> out;
  while (!body.empty()) {
    const auto nul = body.find('\0');
    if (nul == std::string_view::npos) throw ProtocolError("unterminated string field");
    out.push_back(body.substr(0, nul));
    body.remove_prefix(nul + 1);
  }
  return out;
}

std::string IsolationStatement(std::string_view level) {
  std::string upper;
  for (char c : level) upper.push_back(c == '_' ? ' ' : static_cast<char>(std::toupper(c)));
  return "SET SESSION CHARACTERISTICS AS TRANSACTION ISOLATION LEVEL " + upper;
}

}  // namespace

std::string PgStartupMessage(std::string_view user, std::string_view database) {
  std::string body;
  AppendInt32(body, kPgProtocolVersion);
  AppendCString(body, "user");
  AppendCString(body, user);
  AppendCString(body, "database");
  AppendCString(body, database);
  body.push_back('\0');
  std::string msg;
  AppendInt32(msg, static_cast<uint32_t>(body.size() + 4));
  return msg + body;
}

std::string PgQueryMessage(std::string_view sql) {
  std::string body;
  AppendCString(body, sql);
  return PgBackendMessage('Q', body);
}

std::string PgPasswordMessage(std::string_view password) {
  std::string body;
  AppendCString(body, password);
  return PgBackendMessage('p', body);
}

std::string PgBackendMessage(char type, std::string_view body) {
  std::string msg(1, type);
  AppendInt32(msg, static_cast<uint32_t>(body.size() + 4));
  msg.append(body);
  return msg;
}

std::string PgErrorText(std::string_view body) {
  std::string severity, code, message;
  while (!body.empty() && body.front() != '\0') {
    const char field = body.front();
    body.remove_prefix(1);
    const auto nul = body.find('\0');
    if (nul == std::string_view::npos) break;
    const std::string_view value = body.substr(0, nul);
    body.remove_prefix(nul + 1);
    if (field == 'S') severity = value;
    if (field == 'C') code = value;
    if (field == 'M') message = value;
  }
  std::string text = severity.empty() ? "ERROR" : severity;
  if (!code.empty()) text += " " + code;
  return text + ": " + message;
}

PgConnection PgConnection::Connect(const PgConnectOptions& options) {
  PgConnection conn(Socket::Connect(options.server));
  try {
    conn.socket_.SendAll(PgStartupMessage(options.user, options.database));
    while (true) {
      Message m = conn.ReadMessage();
      switch (m.type) {
        case 'R': {
          const uint32_t code = ReadInt32(m.body, 0);
          if (code == 0) break;
          if (code == 3) {
            if (!options.password) {
              throw BackendError("server requested a password but none is configured");
            }
            conn.socket_.SendAll(PgPasswordMessage(*options.password));
            break;
          }
          throw BackendError("unsupported authentication method " + std::to_string(code) +
                             " (only trust and cleartext password are implemented)");
        }
        case 'E':
          throw BackendError("server rejected session: " + PgErrorText(m.body));
        case 'Z':
          if (!options.isolation.empty()) {
            Response r = conn.SimpleQuery(IsolationStatement(options.isolation));
            if (!r.ok()) conn.isolation_warning_ = r.server_message.value_or("rejected");
          }
          return conn;
        default:
          conn.HandleAsync(m);
      }
    }
  } catch (const IoError& e) {
    throw BackendError(std::string("startup with ") + options.server.ToString() + " failed: " + e.what());
  }
}

PgConnection::Message PgConnection::ReadMessage() {
  std::array<std::byte, 5> header;
  if (!socket_.RecvExact(header)) throw IoError("server closed the connection");
  Message m;
  m.type = static_cast<char>(header[0]);
  const uint32_t len = GetBigEndian32(header.data() + 1);
  if (len < 4 || len > kMaxMessageLength) {
    throw ProtocolError("invalid message length " + std::to_string(len) + " for type '" +
                        std::string(1, m.type) + "'");
  }
  m.body.resize(len - 4);
  if (!m.body.empty() &&
      !socket_.RecvExact(std::as_writable_bytes(std::span(m.body.data(), m.body.size())))) {
    throw IoError("server closed the connection mid-message");
  }
  return m;
}

void PgConnection::HandleAsync(const Message& m) {
  switch (m.type) {
    case 'S': {
      const auto fields = CStrings(m.body);
      if (fields.size() != 2) throw ProtocolError("malformed ParameterStatus");
      parameters_[std::string(fields[0])] = std::string(fields[1]);
      return;
    }
    case 'K':  // BackendKeyData
    case 'N':  // NoticeResponse
    case 'A':  // NotificationResponse
      return;
    default:
      throw ProtocolError("unexpected message type '" + std::string(1, m.type) + "'");
  }
}

Response PgConnection::SimpleQuery(std::string_view sql) {
  if (sql.find('\0') != std::string_view::npos) {
    return Response::Error("query text contains a NUL byte");
  }
  socket_.SendAll(PgQueryMessage(sql));
  Response response;
  int64_t rows = 0;
  while (true) {
    Message m = ReadMessage();
    switch (m.type) {
      case 'T':  // RowDescription
      case 'C':  // CommandComplete
      case 'I':  // EmptyQueryResponse
      case 'n':  // NoData
        break;
      case 'D':
        ++rows;
        break;
      case 'E':
        response = Response::Error(PgErrorText(m.body));
        break;
      case 'Z':
        if (m.body.size() != 1) throw ProtocolError("malformed ReadyForQuery");
        if (response.ok()) response.rows_returned = rows;
        return response;
      case 'G':
      case 'H':
      case 'W':
        throw ProtocolError("COPY is not supported by the simple-query client");
      default:
        HandleAsync(m);
    }
  }
}

Response PgBackend::Execute(const Request& request) {
  if (!request.sql_text) {
    throw ValidationError("sql backend needs rendered SQL for " + std::string(request.txn.label()));
  }
  return connection_.SimpleQuery(*request.sql_text);
}

}  // namespace tailnoise
