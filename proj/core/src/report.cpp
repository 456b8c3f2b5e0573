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

#include "supersage/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "supersage/errors.hpp"

namespace supersage {

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  if (config.source == ExperimentConfig::Source::Sbm) {
    j["graph"] = "sbm";
    j["sbm.num_nodes"] = config.sbm_num_nodes;
    j["sbm.num_classes"] = config.sbm_num_classes;
    j["sbm.p_in"] = config.sbm_p_in;
    j["sbm.p_out"] = config.sbm_p_out;
    j["sbm.feature_dim"] = config.sbm_feature_dim;
    j["sbm.feature_noise"] = config.sbm_feature_noise;
  } else {
    j["graph"] = "files";
    j["files.edges"] = config.files_edges;
    j["files.features"] = config.files_features;
    j["files.labels"] = config.files_labels;
    if (config.files_masks) j["files.masks"] = *config.files_masks;
  }
  j["workers"] = config.workers;
  j["partition.method"] = to_string(config.partition_method);
  if (config.partition_seed) j["partition.seed"] = *config.partition_seed;
  j["phi"] = to_string(config.phi);
  if (config.ratio) j["ratio"] = *config.ratio;
  j["feedback"] = config.feedback;
  j["grouping"] = to_string(config.grouping);
  j["model.hidden_dim"] = config.hidden_dim;
  j["model.layers"] = config.num_layers;
  j["epochs"] = config.epochs;
  j["learning_rate"] = config.learning_rate;
  j["momentum"] = config.momentum;
  j["aux_lr"] = config.aux_lr;
  j["seed"] = config.seed;
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentConfig& config, ExecMode mode,
                           const RunReport& report) {
  json j;
  j["config"] = config_to_json(config);
  j["mode"] = mode == ExecMode::SerialDeterministic ? "serial" : "concurrent";

  json per_epoch;
  auto& loss = per_epoch["loss"] = json::array();
  auto& train_acc = per_epoch["train_acc"] = json::array();
  auto& val_acc = per_epoch["val_acc"] = json::array();
  auto& test_acc = per_epoch["test_acc"] = json::array();
  auto& payload = per_epoch["payload_bytes"] = json::array();
  auto& metadata = per_epoch["metadata_bytes"] = json::array();
  auto& baseline = per_epoch["baseline_bytes"] = json::array();
  auto& grad = per_epoch["grad_bytes"] = json::array();
  auto& delta = per_epoch["delta_emp"] = json::array();
  auto& residual = per_epoch["max_residual_norm"] = json::array();
  for (const EpochMetrics& e : report.epochs) {
    loss.push_back(e.loss);
    train_acc.push_back(e.train_acc);
    val_acc.push_back(e.val_acc);
    test_acc.push_back(e.test_acc);
    payload.push_back(e.payload_bytes);
    metadata.push_back(e.metadata_bytes);
    baseline.push_back(e.baseline_bytes);
    grad.push_back(e.grad_bytes);
    if (e.delta_infinite) {
      delta.push_back(nullptr);  // JSON has no Inf
    } else {
      delta.push_back(e.delta_emp);
    }
    residual.push_back(e.max_residual_norm);
  }
  j["per_epoch"] = std::move(per_epoch);

  json summary;
  summary["final_loss"] = report.final_loss();
  summary["final_test_acc"] = report.final_test_acc();
  summary["total_payload_bytes"] = report.total_payload_bytes();
  summary["total_baseline_bytes"] = report.total_baseline_bytes();
  summary["bytes_ratio"] = report.bytes_ratio();
  summary["delta_infinite"] = report.epochs.back().delta_infinite;
  summary["accumulator_elements"] = report.accumulator_elements;
  summary["feature_elements"] = report.feature_elements;
  summary["graph_fingerprint"] = report.graph_fingerprint;
  j["summary"] = std::move(summary);

  return j.dump(2) + "\n";
}

std::string metrics_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << "epoch,loss,train_acc,val_acc,test_acc,payload_bytes,metadata_bytes,"
         "baseline_bytes,grad_bytes,delta_emp,max_residual_norm\n";
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const EpochMetrics& m = report.epochs[e];
    out << e << ',' << format_double(m.loss) << ',' << format_double(m.train_acc) << ','
        << format_double(m.val_acc) << ',' << format_double(m.test_acc) << ','
        << m.payload_bytes << ',' << m.metadata_bytes << ',' << m.baseline_bytes << ','
        << m.grad_bytes << ','
        << (m.delta_infinite ? "inf" : format_double(m.delta_emp)) << ','
        << format_double(m.max_residual_norm) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << contents;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace supersage
