// Copyright 2026 The gridauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Request/response plumbing shared by the attribute, admin and gatekeeper
// services: canonical-document bodies POSTed to a path on `host:port`.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gridauth/canonical.h"
#include "gridauth/error.h"

namespace gridauth {

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Sends `body` to `path` on `endpoint` ("host:port"). Throws
/// kTransportError when the endpoint cannot be reached.
using Transport = std::function<HttpResponse(const std::string& endpoint, const std::string& path,
                                             const std::string& body)>;

using Handler = std::function<HttpResponse(const std::string& body)>;

/// Splits "host:port"; throws kInvalidArgument on malformed input.
std::pair<std::string, int> parse_endpoint(std::string_view endpoint);

Transport http_transport(int timeout_seconds = 10);

/// Routes requests directly to in-process handlers keyed by endpoint and
/// path; unknown endpoints behave like unreachable hosts.
class LoopbackNetwork {
 public:
  void serve(const std::string& endpoint, const std::string& path, Handler handler);
  void take_down(const std::string& endpoint);
  Transport transport() const;

 private:
  std::shared_ptr<std::map<std::string, std::map<std::string, Handler>>> routes_ =
      std::make_shared<std::map<std::string, std::map<std::string, Handler>>>();
};

/// Minimal HTTP server: POST routes only.
class HttpServer {
 public:
  HttpServer();
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  void route(const std::string& path, Handler handler);
  /// Binds (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on a background thread until stop().
  void start();
  /// Serves on the calling thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `{code, detail}` error document, with `details` as an extra array when
/// non-empty.
Document error_document(const Error& error);
int http_status_for(ErrorCode code);
HttpResponse error_response(const Error& error);
/// Throws the Error described by a non-200 response, prefixing `context`.
[[noreturn]] void throw_error_response(const HttpResponse& response, const std::string& context);

}  // namespace gridauth
