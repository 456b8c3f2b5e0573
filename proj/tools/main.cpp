// Copyright 2026 The supersage Authors.
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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supersage/errors.hpp"
#include "supersage/experiments.hpp"
#include "supersage/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<long long> seed_override;
  std::string mode = "serial";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out = true) {
  cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  if (with_out) cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed_override, "override the config seed");
  cmd->add_option("--mode", opts.mode, "execution mode")
      ->check(CLI::IsMember({"serial", "concurrent"}));
}

supersage::ExperimentConfig load_config(const CommonOptions& opts) {
  supersage::ExperimentConfig config = supersage::ExperimentConfig::parse_file(opts.config_path);
  if (opts.seed_override) {
    config.seed = static_cast<std::uint64_t>(*opts.seed_override);
  }
  return config;
}

supersage::ExecMode exec_mode(const CommonOptions& opts) {
  return opts.mode == "concurrent" ? supersage::ExecMode::Concurrent
                                   : supersage::ExecMode::SerialDeterministic;
}

std::string output_dir(const CommonOptions& opts, const supersage::ExperimentConfig& config) {
  if (opts.out_dir != "out") return opts.out_dir;
  return config.out_dir.value_or(opts.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"supersage: distributed GraphSAGE training simulator with "
               "super-node compression of boundary features"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a single training run");
  add_common(run_cmd, run_opts);

  CommonOptions sweep_opts;
  std::vector<double> ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a compression-ratio sweep");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--ratios", ratios,
                        "ratios to sweep (0 runs the phi=none baseline)")
      ->delimiter(',');

  CommonOptions ablate_opts;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "run the {feedback on/off} x {phi} ablation matrix");
  add_common(ablate_cmd, ablate_opts);

  CommonOptions gen_opts;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "write the configured SBM graph as files");
  add_common(gen_cmd, gen_opts);

  CommonOptions validate_opts;
  CLI::App* validate_cmd =
      app.add_subcommand("validate-config", "check a config file and print its normal form");
  add_common(validate_cmd, validate_opts, /*with_out=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto config = load_config(run_opts);
      const auto outputs = run_single(config, output_dir(run_opts, config), exec_mode(run_opts));
      std::printf("final loss %.6f  test accuracy %.4f  bytes ratio %.4f\n",
                  outputs.report.final_loss(), outputs.report.final_test_acc(),
                  outputs.report.bytes_ratio());
      std::printf("wrote %s and %s\n", outputs.report_json.string().c_str(),
                  outputs.metrics_csv.string().c_str());
    } else if (sweep_cmd->parsed()) {
      const auto config = load_config(sweep_opts);
      const auto rows = run_sweep(config, ratios, output_dir(sweep_opts, config),
                                  exec_mode(sweep_opts));
      std::printf("%8s  %14s  %12s\n", "r", "final_test_acc", "bytes_ratio");
      for (const auto& row : rows) {
        std::printf("%8.3f  %14.4f  %12.4f\n", row.ratio, row.final_test_acc, row.bytes_ratio);
      }
    } else if (ablate_cmd->parsed()) {
      const auto config = load_config(ablate_opts);
      const auto rows = run_ablation(config, output_dir(ablate_opts, config),
                                     exec_mode(ablate_opts));
      std::printf("%10s  %8s  %14s  %12s\n", "phi", "feedback", "final_test_acc", "payload");
      for (const auto& row : rows) {
        std::printf("%10s  %8s  %14.4f  %12llu\n", supersage::to_string(row.phi).c_str(),
                    row.feedback ? "on" : "off", row.final_test_acc,
                    static_cast<unsigned long long>(row.payload_bytes));
      }
    } else if (gen_cmd->parsed()) {
      const auto config = load_config(gen_opts);
      gen_data(config, output_dir(gen_opts, config));
      std::printf("wrote edges.txt, features.txt, labels.txt, masks.txt under %s\n",
                  output_dir(gen_opts, config).c_str());
    } else if (validate_cmd->parsed()) {
      const auto config = load_config(validate_opts);
      config.validate();
      std::fputs(config.serialize().c_str(), stdout);
    }
  } catch (const supersage::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const supersage::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
