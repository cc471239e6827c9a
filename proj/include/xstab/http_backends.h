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

#ifndef XSTAB_HTTP_BACKENDS_H_
#define XSTAB_HTTP_BACKENDS_H_

#include <string>

#include "json.hpp"
#include "xstab/modelclient.h"

namespace xstab {

// POSTs a JSON body to base_url + path and returns the parsed response.
// Connection failures, 5xx and 429 are retried with exponential backoff
// (base_delay, 2*base_delay, ...) up to policy.max_retries times; other
// non-2xx statuses fail immediately. Throws TransportError when the call
// cannot complete and ProtocolError when the body is not JSON.
nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& policy,
                        const std::string& bearer_token = {});

// Reads the token from the environment variable `env_name` ("" -> none).
std::string BearerTokenFromEnv(const std::string& env_name);

// POST /predict {"text"} -> {"probs": {label: p}}.
class HttpClassifierBackend : public PredictionBackend {
 public:
  HttpClassifierBackend(ModelHandle handle, RetryPolicy policy);
  Prediction Query(const std::string& query) override;

 private:
  ModelHandle handle_;
  RetryPolicy policy_;
  std::string token_;
};

// POST /score_labels {"prompt", "candidates"} -> {"logprobs": {cand: lp}}.
class HttpCompletionBackend : public PredictionBackend {
 public:
  HttpCompletionBackend(ModelHandle handle, RetryPolicy policy);
  Prediction Query(const std::string& prompt) override;

 private:
  ModelHandle handle_;
  RetryPolicy policy_;
  std::string token_;
};

// Converts a {"probs": {...}} payload into a Prediction over `labels`.
// Throws ProtocolError on missing labels, negative or non-numeric entries,
// or a distribution that cannot be normalized.
Prediction ParseClassifierResponse(const nlohmann::json& response,
                                   const LabelSet& labels);

}  // namespace xstab

#endif  // XSTAB_HTTP_BACKENDS_H_
