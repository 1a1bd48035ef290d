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


#include "gridauth/transport.h"

#include <charconv>
#include <optional>

#include "httplib.h"

namespace gridauth {

std::pair<std::string, int> parse_endpoint(std::string_view endpoint) {
  auto colon = endpoint.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be host:port, got '" +
                                                 std::string(endpoint) + "'");
  }
  int port = 0;
  std::string_view digits = endpoint.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port <= 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in endpoint '" + std::string(endpoint) + "'");
  }
  return {std::string(endpoint.substr(0, colon)), port};
}

Transport http_transport(int timeout_seconds) {
  return [timeout_seconds](const std::string& endpoint, const std::string& path,
                           const std::string& body) -> HttpResponse {
    auto [host, port] = parse_endpoint(endpoint);
    httplib::Client client(host, port);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    auto res = client.Post(path, body, "application/octet-stream");
    if (!res) {
      throw Error(ErrorCode::kTransportError,
                  endpoint + ": " + httplib::to_string(res.error()), {endpoint});
    }
    return HttpResponse{res->status, res->body};
  };
}

void LoopbackNetwork::serve(const std::string& endpoint, const std::string& path,
                            Handler handler) {
  (*routes_)[endpoint][path] = std::move(handler);
}

void LoopbackNetwork::take_down(const std::string& endpoint) { routes_->erase(endpoint); }

Transport LoopbackNetwork::transport() const {
  auto routes = routes_;
  return [routes](const std::string& endpoint, const std::string& path,
                  const std::string& body) -> HttpResponse {
    auto host = routes->find(endpoint);
    if (host == routes->end()) {
      throw Error(ErrorCode::kTransportError, endpoint + ": connection refused", {endpoint});
    }
    auto route = host->second.find(path);
    if (route == host->second.end()) return HttpResponse{404, "not found"};
    return route->second(body);
  };
}

struct HttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer() : impl_(std::make_unique<Impl>()) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::route(const std::string& path, Handler handler) {
  impl_->server.Post(path, [handler = std::move(handler)](const httplib::Request& req,
                                                          httplib::Response& res) {
    HttpResponse out = handler(req.body);
    res.status = out.status;
    res.set_content(out.body, "application/octet-stream");
  });
}

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

Document error_document(const Error& error) {
  Document doc{{"code", std::string(error_code_name(error.code()))}, {"detail", error.what()}};
  if (!error.details().empty()) doc["details"] = error.details();
  return doc;
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAuthenticationFailed: return 401;
    case ErrorCode::kNotAuthorized:
    case ErrorCode::kUnauthorizedAttributes: return 403;
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownEntity:
    case ErrorCode::kUnknownScope:
    case ErrorCode::kUnknownRequest: return 404;
    case ErrorCode::kReplayDetected:
    case ErrorCode::kAlreadyDecided:
    case ErrorCode::kDuplicateName:
    case ErrorCode::kCycleWouldForm: return 409;
    case ErrorCode::kIoError: return 500;
    default: return 400;
  }
}

HttpResponse error_response(const Error& error) {
  return HttpResponse{http_status_for(error.code()), canonical_serialize(error_document(error))};
}

void throw_error_response(const HttpResponse& response, const std::string& context) {
  std::optional<Error> remote;
  try {
    Document doc = canonical_parse(response.body);
    std::vector<std::string> details;
    if (auto it = doc.find("details"); it != doc.end() && it->is_array()) {
      for (const auto& d : *it) {
        if (d.is_string()) details.push_back(d.get<std::string>());
      }
    }
    remote.emplace(error_code_from_name(get_string(doc, "code")),
                   context + ": " + get_string(doc, "detail"), std::move(details));
  } catch (const Error&) {
  }
  if (remote) throw *remote;
  throw Error(ErrorCode::kTransportError,
              context + ": HTTP " + std::to_string(response.status), {context});
}

}  // namespace gridauth
