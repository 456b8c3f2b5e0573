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

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "supersage/config.hpp"
#include "supersage/trainer.hpp"

namespace supersage {

struct RunOutputs {
  std::filesystem::path report_json;
  std::filesystem::path metrics_csv;
  RunReport report;
};

/// Executes one training run and writes report.json + metrics.csv under
/// out_dir (created if needed).
RunOutputs run_single(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      ExecMode mode);

struct SweepRow {
  double ratio = 0.0;  // 0 encodes the uncompressed (phi = none) baseline
  double final_test_acc = 0.0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t baseline_bytes = 0;
  double bytes_ratio = 0.0;
};

/// One run per ratio, all sharing the base config's seed. ratio 0 runs the
/// phi = none baseline. Sub-runs execute in parallel, each in its own
/// out_dir/r_<ratio>/ directory; sweep.csv summarizes
/// (r, final_test_acc, payload_bytes, baseline_bytes, bytes_ratio).
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, std::span<const double> ratios,
                                const std::filesystem::path& out_dir, ExecMode mode);

struct AblationRow {
  Phi phi = Phi::None;
  bool feedback = false;
  double final_test_acc = 0.0;
  std::uint64_t payload_bytes = 0;
  double bytes_ratio = 0.0;
};

/// The 2x4 {feedback on/off} x {none, mean, weighted, attention} matrix at the
/// base config's ratio and seed; writes ablation.csv.
std::vector<AblationRow> run_ablation(const ExperimentConfig& base,
                                      const std::filesystem::path& out_dir, ExecMode mode);

/// Emits the configured SBM graph as edges.txt/features.txt/labels.txt/masks.txt.
void gen_data(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace supersage
