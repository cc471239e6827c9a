// Copyright 2026 The xstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xstab/mock_server.h"

#include <atomic>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "xstab/errors.h"

namespace xstab {

using nlohmann::json;

struct MockServer::Impl {
  MockServerOptions options;
  httplib::Server server;
  std::thread thread;
  std::atomic<std::size_t> requests{0};
  std::string host = "127.0.0.1";
  int port = 0;

  explicit Impl(MockServerOptions opts) : options(std::move(opts)) {}

  // Returns false when the request was answered with an injected fault.
  bool Admit(const httplib::Request& req, httplib::Response& res) {
    const std::size_t index = requests.fetch_add(1);
    if (!options.required_token.empty() &&
        req.get_header_value("Authorization") != "Bearer " + options.required_token) {
      res.status = 401;
      res.set_content("{\"error\":\"unauthorized\"}", "application/json");
      return false;
    }
    if (index < static_cast<std::size_t>(std::max(options.fail_first_n, 0))) {
      res.status = options.fail_status;
      res.set_content("{\"error\":\"injected\"}", "application/json");
      return false;
    }
    if (options.malformed) {
      res.status = 200;
      res.set_content("<html>not json</html>", "text/html");
      return false;
    }
    return true;
  }

  static bool ParseBody(const httplib::Request& req, httplib::Response& res, json& out) {
    try {
      out = json::parse(req.body);
      if (out.is_object()) return true;
    } catch (const json::parse_error&) {
    }
    res.status = 400;
    res.set_content("{\"error\":\"bad request\"}", "application/json");
    return false;
  }

  void Install() {
    server.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      if (!Admit(req, res) || !ParseBody(req, res, body)) return;
      const Prediction p = ToyPredict(options.lexicon, body.value("text", ""));
      json probs = json::object();
      for (std::size_t i = 0; i < options.labels.size() && i < p.probs().size(); ++i) {
        probs[options.labels[i]] = p.probs()[i];
      }
      res.set_content(json{{"probs", probs}}.dump(), "application/json");
    });
    server.Post("/score_labels",
                [this](const httplib::Request& req, httplib::Response& res) {
                  json body;
                  if (!Admit(req, res) || !ParseBody(req, res, body)) return;
                  const Prediction p =
                      ToyPredict(options.lexicon, body.value("prompt", ""));
                  json logprobs = json::object();
                  const json candidates = body.value("candidates", json::array());
                  for (std::size_t i = 0; i < candidates.size(); ++i) {
                    const std::string c = candidates[i].get<std::string>();
                    if (c == options.drop_candidate) continue;
                    logprobs[c] = i < p.probs().size() ? std::log(p.probs()[i]) : -1e9;
                  }
                  res.set_content(json{{"logprobs", logprobs}}.dump(),
                                  "application/json");
                });
    server.Post("/translate", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      if (!Admit(req, res) || !ParseBody(req, res, body)) return;
      DictionaryTranslator translator(options.en_to_de, options.de_to_en);
      try {
        const std::string text = translator.Translate(
            body.value("text", ""), body.value("source", ""), body.value("target", ""));
        res.set_content(json{{"text", text}}.dump(), "application/json");
      } catch (const Error& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
  }
};

MockServer::MockServer(MockServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->Install();
}

MockServer::~MockServer() { Stop(); }

int MockServer::Start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) throw TransportError("cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockServer::Listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw TransportError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void MockServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

std::size_t MockServer::requests() const { return impl_->requests.load(); }

}  // namespace xstab
