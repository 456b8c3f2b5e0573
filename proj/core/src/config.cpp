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

#include "supersage/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "supersage/errors.hpp"

namespace supersage {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParseError("expected 'key = value' in config", line_no);
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("empty config key", line_no);
      if (values_.count(key)) throw ConfigError(key, "duplicate key");
      values_[key] = value;
    }
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string value = it->second;
    values_.erase(it);
    return value;
  }

  std::string require(const std::string& key) {
    auto value = take(key);
    if (!value) throw ConfigError(key, "missing required key");
    return *value;
  }

  void ensure_consumed() const {
    if (!values_.empty()) {
      throw ConfigError(values_.begin()->first, "unknown key");
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not an integer: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError(key, "expected on/off: '" + value + "'");
}

}  // namespace

std::string to_string(Phi phi) {
  switch (phi) {
    case Phi::None: return "none";
    case Phi::Mean: return "mean";
    case Phi::Weighted: return "weighted";
    case Phi::Attention: return "attention";
  }
  return "none";
}

std::string to_string(GroupingStrategy strategy) {
  return strategy == GroupingStrategy::Chunk ? "chunk" : "kmeans";
}

std::string to_string(PartitionMethod method) {
  return method == PartitionMethod::Hash ? "hash" : "bfs-greedy";
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  KeyValues kv(text);
  ExperimentConfig cfg;

  const std::string source = kv.require("graph");
  if (source == "sbm") {
    cfg.source = Source::Sbm;
    cfg.sbm_num_nodes =
        static_cast<std::size_t>(parse_int("sbm.num_nodes", kv.require("sbm.num_nodes")));
    cfg.sbm_num_classes =
        static_cast<int>(parse_int("sbm.num_classes", kv.require("sbm.num_classes")));
    cfg.sbm_p_in = parse_double("sbm.p_in", kv.require("sbm.p_in"));
    cfg.sbm_p_out = parse_double("sbm.p_out", kv.require("sbm.p_out"));
    cfg.sbm_feature_dim =
        static_cast<std::size_t>(parse_int("sbm.feature_dim", kv.require("sbm.feature_dim")));
    if (auto v = kv.take("sbm.feature_noise")) {
      cfg.sbm_feature_noise = parse_double("sbm.feature_noise", *v);
    }
  } else if (source == "files") {
    cfg.source = Source::Files;
    cfg.files_edges = kv.require("files.edges");
    cfg.files_features = kv.require("files.features");
    cfg.files_labels = kv.require("files.labels");
    cfg.files_masks = kv.take("files.masks");
  } else {
    throw ConfigError("graph", "expected sbm or files, got '" + source + "'");
  }

  if (auto v = kv.take("workers")) cfg.workers = static_cast<int>(parse_int("workers", *v));
  if (auto v = kv.take("partition.method")) {
    if (*v == "hash") {
      cfg.partition_method = PartitionMethod::Hash;
    } else if (*v == "bfs-greedy") {
      cfg.partition_method = PartitionMethod::BfsGreedy;
    } else {
      throw ConfigError("partition.method", "expected hash or bfs-greedy, got '" + *v + "'");
    }
  }
  if (auto v = kv.take("partition.seed")) {
    cfg.partition_seed = static_cast<std::uint64_t>(parse_int("partition.seed", *v));
  }

  if (auto v = kv.take("phi")) {
    if (*v == "none") {
      cfg.phi = Phi::None;
    } else if (*v == "mean") {
      cfg.phi = Phi::Mean;
    } else if (*v == "weighted") {
      cfg.phi = Phi::Weighted;
    } else if (*v == "attention") {
      cfg.phi = Phi::Attention;
    } else {
      throw ConfigError("phi", "expected none/mean/weighted/attention, got '" + *v + "'");
    }
  }

  const auto ratio_value = kv.take("ratio");
  if (ratio_value) {
    cfg.ratio = parse_double("ratio", *ratio_value);
  } else if (cfg.phi != Phi::None) {
    cfg.ratio = 0.5;  // default compression: 50% reduction
  }

  if (auto v = kv.take("feedback")) cfg.feedback = parse_bool("feedback", *v);
  if (auto v = kv.take("grouping")) {
    if (*v == "chunk") {
      cfg.grouping = GroupingStrategy::Chunk;
    } else if (*v == "kmeans") {
      cfg.grouping = GroupingStrategy::Kmeans;
    } else {
      throw ConfigError("grouping", "expected chunk or kmeans, got '" + *v + "'");
    }
  }

  if (auto v = kv.take("model.hidden_dim")) {
    cfg.hidden_dim = static_cast<std::size_t>(parse_int("model.hidden_dim", *v));
  }
  if (auto v = kv.take("model.layers")) {
    cfg.num_layers = static_cast<int>(parse_int("model.layers", *v));
  }
  cfg.epochs = static_cast<int>(parse_int("epochs", kv.require("epochs")));
  if (auto v = kv.take("learning_rate")) cfg.learning_rate = parse_double("learning_rate", *v);
  if (auto v = kv.take("momentum")) cfg.momentum = parse_double("momentum", *v);
  if (auto v = kv.take("aux_lr")) cfg.aux_lr = parse_double("aux_lr", *v);
  if (auto v = kv.take("seed")) {
    cfg.seed = static_cast<std::uint64_t>(parse_int("seed", *v));
  }
  cfg.out_dir = kv.take("out");

  kv.ensure_consumed();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  if (source == Source::Sbm) {
    out << "graph = sbm\n";
    out << "sbm.num_nodes = " << sbm_num_nodes << "\n";
    out << "sbm.num_classes = " << sbm_num_classes << "\n";
    out << "sbm.p_in = " << format_double(sbm_p_in) << "\n";
    out << "sbm.p_out = " << format_double(sbm_p_out) << "\n";
    out << "sbm.feature_dim = " << sbm_feature_dim << "\n";
    out << "sbm.feature_noise = " << format_double(sbm_feature_noise) << "\n";
  } else {
    out << "graph = files\n";
    out << "files.edges = " << files_edges << "\n";
    out << "files.features = " << files_features << "\n";
    out << "files.labels = " << files_labels << "\n";
    if (files_masks) out << "files.masks = " << *files_masks << "\n";
  }
  out << "workers = " << workers << "\n";
  out << "partition.method = " << to_string(partition_method) << "\n";
  if (partition_seed) out << "partition.seed = " << *partition_seed << "\n";
  out << "phi = " << to_string(phi) << "\n";
  if (ratio) out << "ratio = " << format_double(*ratio) << "\n";
  out << "feedback = " << (feedback ? "on" : "off") << "\n";
  out << "grouping = " << to_string(grouping) << "\n";
  out << "model.hidden_dim = " << hidden_dim << "\n";
  out << "model.layers = " << num_layers << "\n";
  out << "epochs = " << epochs << "\n";
  out << "learning_rate = " << format_double(learning_rate) << "\n";
  out << "momentum = " << format_double(momentum) << "\n";
  out << "aux_lr = " << format_double(aux_lr) << "\n";
  out << "seed = " << seed << "\n";
  if (out_dir) out << "out = " << *out_dir << "\n";
  return out.str();
}

void ExperimentConfig::validate() const {
  if (source == Source::Sbm) {
    if (sbm_num_nodes < 1) throw ConfigError("sbm.num_nodes", "must be >= 1");
    if (sbm_num_classes < 1) throw ConfigError("sbm.num_classes", "must be >= 1");
    if (sbm_num_nodes < static_cast<std::size_t>(sbm_num_classes)) {
      throw ConfigError("sbm.num_nodes", "must be >= sbm.num_classes");
    }
    if (!(sbm_p_out >= 0.0 && sbm_p_out < sbm_p_in && sbm_p_in <= 1.0)) {
      throw ConfigError("sbm.p_in", "must satisfy 0 <= p_out < p_in <= 1");
    }
    if (sbm_feature_dim < 1) throw ConfigError("sbm.feature_dim", "must be >= 1");
    if (sbm_feature_noise < 0.0) throw ConfigError("sbm.feature_noise", "must be >= 0");
  } else {
    if (files_edges.empty()) throw ConfigError("files.edges", "must not be empty");
    if (files_features.empty()) throw ConfigError("files.features", "must not be empty");
    if (files_labels.empty()) throw ConfigError("files.labels", "must not be empty");
  }
  // Shared bounds live in TrainSettings::validate; run it on the mapped
  // settings so a bad config fails before any graph is built.
  settings(ExecMode::SerialDeterministic).validate();
}

Graph ExperimentConfig::build_graph() const {
  if (source == Source::Sbm) {
    SbmParams params;
    params.num_nodes = sbm_num_nodes;
    params.num_classes = sbm_num_classes;
    params.p_in = sbm_p_in;
    params.p_out = sbm_p_out;
    params.feature_dim = sbm_feature_dim;
    params.feature_noise = sbm_feature_noise;
    params.seed = seed;
    return generate_sbm(params);
  }
  return load_edge_list(files_edges, files_features, files_labels, files_masks);
}

TrainSettings ExperimentConfig::settings(ExecMode mode) const {
  TrainSettings s;
  s.num_workers = workers;
  s.partition_method = partition_method;
  s.partition_seed = partition_seed;
  s.phi = phi;
  s.ratio = ratio;
  s.feedback = feedback;
  s.grouping = grouping;
  s.hidden_dim = hidden_dim;
  s.num_layers = num_layers;
  s.epochs = epochs;
  s.learning_rate = learning_rate;
  s.momentum = momentum;
  s.aux_lr = aux_lr;
  s.seed = seed;
  s.mode = mode;
  return s;
}

bool ExperimentConfig::same_experiment_identity(const ExperimentConfig& other) const {
  if (source != other.source || seed != other.seed) return false;
  if (source == Source::Sbm) {
    return sbm_num_nodes == other.sbm_num_nodes && sbm_num_classes == other.sbm_num_classes &&
           sbm_p_in == other.sbm_p_in && sbm_p_out == other.sbm_p_out &&
           sbm_feature_dim == other.sbm_feature_dim &&
           sbm_feature_noise == other.sbm_feature_noise;
  }
  return files_edges == other.files_edges && files_features == other.files_features &&
         files_labels == other.files_labels && files_masks == other.files_masks;
}

}  // namespace supersage
