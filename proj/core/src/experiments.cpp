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

#include "supersage/experiments.hpp"

#include <charconv>
#include <cstdio>
#include <future>
#include <sstream>

#include "supersage/errors.hpp"
#include "supersage/report.hpp"

namespace supersage {

namespace {

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string ratio_dir_name(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r_%.3g", ratio);
  return buf;
}

}  // namespace

RunOutputs run_single(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      ExecMode mode) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const Graph graph = config.build_graph();
  RunOutputs outputs;
  outputs.report = run_training(graph, config.settings(mode));
  outputs.report_json = out_dir / "report.json";
  outputs.metrics_csv = out_dir / "metrics.csv";
  write_text_file(outputs.report_json.string(), report_to_json(config, mode, outputs.report));
  write_text_file(outputs.metrics_csv.string(), metrics_to_csv(outputs.report));
  return outputs;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, std::span<const double> ratios,
                                const std::filesystem::path& out_dir, ExecMode mode) {
  if (ratios.empty()) throw ParameterError("sweep needs at least one ratio");
  base.validate();
  std::filesystem::create_directories(out_dir);

  std::vector<ExperimentConfig> configs;
  configs.reserve(ratios.size());
  for (double r : ratios) {
    ExperimentConfig cfg = base;
    if (r == 0.0) {
      cfg.phi = Phi::None;  // uncompressed baseline row
      cfg.ratio.reset();
    } else {
      if (cfg.phi == Phi::None) {
        throw ConfigError("phi", "sweep over ratios requires phi != none");
      }
      cfg.ratio = r;
    }
    cfg.validate();
    configs.push_back(std::move(cfg));
  }

  std::vector<std::future<RunOutputs>> futures;
  futures.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::filesystem::path run_dir = out_dir / ratio_dir_name(ratios[i]);
    futures.push_back(std::async(std::launch::async, [config = configs[i], run_dir, mode] {
      return run_single(config, run_dir, mode);
    }));
  }

  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  std::ostringstream csv;
  csv << "r,final_test_acc,payload_bytes,baseline_bytes,bytes_ratio\n";
  for (std::size_t i = 0; i < futures.size(); ++i) {
    RunOutputs outputs;
    try {
      outputs = futures[i].get();
    } catch (const Error& e) {
      throw Error("sweep run r=" + format_double(ratios[i]) + " failed: " + e.what());
    }
    SweepRow row;
    row.ratio = ratios[i];
    row.final_test_acc = outputs.report.final_test_acc();
    row.payload_bytes = outputs.report.total_payload_bytes();
    row.baseline_bytes = outputs.report.total_baseline_bytes();
    row.bytes_ratio = outputs.report.bytes_ratio();
    csv << format_double(row.ratio) << ',' << format_double(row.final_test_acc) << ','
        << row.payload_bytes << ',' << row.baseline_bytes << ','
        << format_double(row.bytes_ratio) << '\n';
    rows.push_back(row);
  }
  write_text_file((out_dir / "sweep.csv").string(), csv.str());
  return rows;
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& base,
                                      const std::filesystem::path& out_dir, ExecMode mode) {
  base.validate();
  std::filesystem::create_directories(out_dir);

  const Phi phis[] = {Phi::None, Phi::Mean, Phi::Weighted, Phi::Attention};
  std::vector<AblationRow> rows;
  std::ostringstream csv;
  csv << "phi,feedback,final_test_acc,payload_bytes,bytes_ratio\n";
  for (bool feedback : {true, false}) {
    for (Phi phi : phis) {
      ExperimentConfig cfg = base;
      cfg.phi = phi;
      cfg.feedback = feedback;
      if (phi == Phi::None) {
        cfg.ratio.reset();
      } else if (!cfg.ratio) {
        cfg.ratio = 0.5;
      }
      cfg.validate();
      const std::filesystem::path run_dir =
          out_dir / ("ablate_" + to_string(phi) + (feedback ? "_ef-on" : "_ef-off"));
      RunOutputs outputs;
      try {
        outputs = run_single(cfg, run_dir, mode);
      } catch (const Error& e) {
        throw Error("ablation run phi=" + to_string(phi) + " feedback=" +
                    (feedback ? std::string("on") : std::string("off")) +
                    " failed: " + e.what());
      }
      AblationRow row;
      row.phi = phi;
      row.feedback = feedback;
      row.final_test_acc = outputs.report.final_test_acc();
      row.payload_bytes = outputs.report.total_payload_bytes();
      row.bytes_ratio = outputs.report.bytes_ratio();
      csv << to_string(phi) << ',' << (feedback ? "on" : "off") << ','
          << format_double(row.final_test_acc) << ',' << row.payload_bytes << ','
          << format_double(row.bytes_ratio) << '\n';
      rows.push_back(row);
    }
  }
  write_text_file((out_dir / "ablation.csv").string(), csv.str());
  return rows;
}

void gen_data(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.source != ExperimentConfig::Source::Sbm) {
    throw ConfigError("graph", "gen-data requires graph = sbm");
  }
  config.validate();
  std::filesystem::create_directories(out_dir);
  const Graph graph = config.build_graph();
  write_graph_files(graph, (out_dir / "edges.txt").string(),
                    (out_dir / "features.txt").string(), (out_dir / "labels.txt").string(),
                    (out_dir / "masks.txt").string());
}

}  // namespace supersage
