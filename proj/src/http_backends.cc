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

#include "xstab/http_backends.h"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "xstab/errors.h"

namespace xstab {
namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl ParseBaseUrl(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url needs a scheme: " + base_url);
  }
  if (base_url.compare(0, scheme_end, "http") != 0) {
    throw ConfigError("only http:// endpoints are supported: " + base_url);
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = base_url;
  } else {
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

bool Retryable(int status) { return status >= 500 || status == 429; }

}  // namespace

std::string BearerTokenFromEnv(const std::string& env_name) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  return value == nullptr ? std::string() : std::string(value);
}

nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& policy,
                        const std::string& bearer_token) {
  const ParsedUrl url = ParseBaseUrl(base_url);
  const std::string full_path = url.path_prefix + path;
  const std::string payload = body.dump();

  std::string last_failure;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(policy.base_delay * (1 << (attempt - 1)));
    }
    httplib::Client client(url.scheme_host_port);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(
        policy.timeout - seconds);
    client.set_connection_timeout(seconds.count(), usec.count());
    client.set_read_timeout(seconds.count(), usec.count());
    client.set_write_timeout(seconds.count(), usec.count());
    if (!bearer_token.empty()) client.set_bearer_token_auth(bearer_token);

    auto result = client.Post(full_path, payload, "application/json");
    if (!result) {
      last_failure = "connection error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_failure = "HTTP " + std::to_string(result->status);
      if (Retryable(result->status)) continue;
      throw TransportError("POST " + base_url + full_path + " failed: " + last_failure);
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError("POST " + base_url + full_path +
                          ": response is not JSON: " + e.what());
    }
  }
  throw TransportError("POST " + base_url + full_path + " failed after " +
                       std::to_string(policy.max_retries) +
                       " retries: " + last_failure);
}

Prediction ParseClassifierResponse(const nlohmann::json& response,
                                   const LabelSet& labels) {
  if (!response.is_object() || !response.contains("probs") ||
      !response["probs"].is_object()) {
    throw ProtocolError("classifier response lacks a \"probs\" object");
  }
  const auto& probs = response["probs"];
  std::vector<double> values(labels.size());
  double total = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto it = probs.find(labels.name(k));
    if (it == probs.end()) {
      throw ProtocolError("classifier response lacks label " + labels.name(k));
    }
    if (!it->is_number()) {
      throw ProtocolError("non-numeric probability for label " + labels.name(k));
    }
    const double p = it->get<double>();
    if (!std::isfinite(p) || p < 0.0) {
      throw ProtocolError("invalid probability for label " + labels.name(k));
    }
    values[k] = p;
    total += p;
  }
  if (!(total > 0.0)) throw ProtocolError("classifier returned zero mass");
  for (double& v : values) v /= total;
  try {
    return Prediction(std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("classifier distribution invalid: ") + e.what());
  }
}

HttpClassifierBackend::HttpClassifierBackend(ModelHandle handle, RetryPolicy policy)
    : handle_(std::move(handle)),
      policy_(policy),
      token_(BearerTokenFromEnv(handle_.bearer_token_env)) {}

Prediction HttpClassifierBackend::Query(const std::string& query) {
  const nlohmann::json response =
      PostJson(handle_.base_url, "/predict", {{"text", query}}, policy_, token_);
  return ParseClassifierResponse(response, handle_.label_set);
}

HttpCompletionBackend::HttpCompletionBackend(ModelHandle handle, RetryPolicy policy)
    : handle_(std::move(handle)),
      policy_(policy),
      token_(BearerTokenFromEnv(handle_.bearer_token_env)) {}

Prediction HttpCompletionBackend::Query(const std::string& prompt) {
  const nlohmann::json request = {{"prompt", prompt},
                                  {"candidates", handle_.label_surface_forms}};
  const nlohmann::json response =
      PostJson(handle_.base_url, "/score_labels", request, policy_, token_);
  if (!response.is_object() || !response.contains("logprobs") ||
      !response["logprobs"].is_object()) {
    throw ProtocolError("score_labels response lacks a \"logprobs\" object");
  }
  std::map<std::string, double, std::less<>> logprobs;
  for (const auto& [candidate, value] : response["logprobs"].items()) {
    if (!value.is_number()) {
      throw ProtocolError("non-numeric log-probability for " + candidate);
    }
    logprobs[candidate] = value.get<double>();
  }
  std::vector<double> probs = ExtractLabelProbsFromCompletion(
      logprobs, handle_.label_set, handle_.label_surface_forms);
  try {
    return Prediction(std::move(probs));
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("completion distribution invalid: ") + e.what());
  }
}

}  // namespace xstab
