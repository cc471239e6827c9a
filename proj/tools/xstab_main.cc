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

// Command-line front end: run, report, perturb --preview, validate,
// serve-mock.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xstab/config.h"
#include "xstab/errors.h"
#include "xstab/mock_server.h"
#include "xstab/runner.h"

namespace {

int RunCommand(const std::string& config_path, const std::string& out_dir,
               std::optional<std::size_t> stop_after) {
  xstab::RunConfig config = xstab::LoadRunConfig(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  xstab::RunOptions options;
  options.stop_after_records = stop_after;
  const xstab::RunSummary s = xstab::ExecuteRun(config, options);
  std::cout << "run_dir " << s.run_dir << "\n"
            << "expected " << s.expected << " ok " << s.ok << " skipped "
            << s.skipped << " failed " << s.failed << "\n"
            << "written " << s.written << " evaluated " << s.evaluated << "\n";
  for (const auto& m : s.aborted_models) std::cout << "aborted " << m << "\n";
  if (s.interrupted) {
    std::cout << "interrupted; rerun to resume\n";
    return 3;
  }
  return s.failed > 0 ? 1 : 0;
}

int PreviewCommand(const std::string& config_path, std::size_t limit) {
  const xstab::RunConfig config = xstab::LoadRunConfig(config_path);
  const xstab::PreparedRun prepared = xstab::PrepareRun(config);
  std::size_t shown = 0;
  for (const auto& c : prepared.grid.cases) {
    if (limit > 0 && shown++ >= limit) break;
    std::cout << xstab::PairedCaseToJson(c).dump() << "\n";
  }
  for (const auto& s : prepared.grid.skipped) {
    std::cerr << xstab::SkippedCaseToJson(s).dump() << "\n";
  }
  return 0;
}

int ServeMock(const std::string& host, int port, const std::string& lexicon_path,
              const std::vector<std::string>& labels) {
  xstab::MockServerOptions options;
  if (!labels.empty()) options.labels = labels;
  if (!lexicon_path.empty()) options.lexicon = xstab::LoadToyLexicon(lexicon_path);
  xstab::MockServer server(std::move(options));
  std::cout << "listening on http://" << host << ":" << port << std::endl;
  server.Listen(host, port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanation stability harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t stop_after = 0;
  auto* run = app.add_subcommand("run", "Run (or resume) an evaluation");
  run->add_option("config", config_path, "Run config (JSON)")->required();
  run->add_option("--out", out_dir, "Override output_dir");
  run->add_option("--stop-after", stop_after,
                  "Stop after writing this many records (resume test)");

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Rebuild report.json and plotdata");
  report->add_option("run_dir", run_dir, "Run directory")->required();

  bool preview = false;
  std::size_t limit = 0;
  auto* perturb = app.add_subcommand("perturb", "Show the perturbation grid");
  perturb->add_option("config", config_path, "Run config (JSON)")->required();
  perturb->add_flag("--preview", preview, "Print paired cases as JSON lines")
      ->required();
  perturb->add_option("--limit", limit, "Print at most this many cases");

  auto* validate = app.add_subcommand("validate", "Check a config and echo it");
  validate->add_option("config", config_path, "Run config (JSON)")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string lexicon_path;
  auto* serve = app.add_subcommand("serve-mock", "Serve the toy model over HTTP");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--lexicon", lexicon_path, "Toy lexicon TSV");
  std::vector<std::string> labels;
  serve->add_option("--labels", labels, "Names of the two toy outputs")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return RunCommand(config_path, out_dir,
                        stop_after > 0 ? std::optional<std::size_t>(stop_after)
                                       : std::nullopt);
    }
    if (*report) {
      xstab::EmitReport(run_dir);
      std::cout << run_dir << "/" << xstab::kReportFile << "\n";
      return 0;
    }
    if (*perturb) return PreviewCommand(config_path, limit);
    if (*validate) {
      const xstab::RunConfig config = xstab::LoadRunConfig(config_path);
      std::cout << xstab::ConfigToJson(config).dump(2) << "\n";
      return 0;
    }
    if (*serve) return ServeMock(host, port, lexicon_path, labels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
