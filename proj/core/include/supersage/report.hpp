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

#include <string>

#include "supersage/config.hpp"
#include "supersage/trainer.hpp"

namespace supersage {

/// JSON report: config echo, execution mode, per-epoch metric arrays, summary.
/// A non-finite delta_emp is emitted as null with delta_infinite flagging it.
std::string report_to_json(const ExperimentConfig& config, ExecMode mode,
                           const RunReport& report);

/// CSV schema (one row per epoch):
/// epoch,loss,train_acc,val_acc,test_acc,payload_bytes,metadata_bytes,
/// baseline_bytes,grad_bytes,delta_emp,max_residual_norm
std::string metrics_to_csv(const RunReport& report);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace supersage
