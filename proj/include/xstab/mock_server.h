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

#ifndef XSTAB_MOCK_SERVER_H_
#define XSTAB_MOCK_SERVER_H_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "xstab/modelclient.h"
#include "xstab/translate.h"

namespace xstab {

// Local HTTP stand-in for hosted models and a translation service.
//   POST /predict       {"text"}                -> {"probs": {label: p}}
//   POST /score_labels  {"prompt","candidates"} -> {"logprobs": {cand: lp}}
//   POST /translate     {"text","source","target"} -> {"text"}
// Scores come from the toy lexicon model; candidate i is scored with log p_i.
struct MockServerOptions {
  Lexicon lexicon;
  // Names for the toy model's two outputs in /predict answers.
  std::vector<std::string> labels = {"pos", "neg"};
  DictionaryTranslator::Table en_to_de;
  DictionaryTranslator::Table de_to_en;
  // The first n requests fail with `fail_status`.
  int fail_first_n = 0;
  int fail_status = 503;
  // Every response body is not JSON.
  bool malformed = false;
  // /score_labels omits this candidate from its answer.
  std::string drop_candidate;
  // If set, requests must carry "Authorization: Bearer <token>".
  std::string required_token;
};

class MockServer {
 public:
  explicit MockServer(MockServerOptions options);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds and starts serving in a background thread. port 0 picks a free
  // port. Returns the bound port.
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until Stop() is called elsewhere.
  void Listen(const std::string& host, int port);
  void Stop();

  std::string base_url() const;
  std::size_t requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace xstab

#endif  // XSTAB_MOCK_SERVER_H_
