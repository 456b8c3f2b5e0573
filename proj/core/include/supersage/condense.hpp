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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "supersage/matrix.hpp"
#include "supersage/partition.hpp"

namespace supersage {

enum class Phi { None, Mean, Weighted, Attention };
enum class GroupingStrategy { Chunk, Kmeans };

/// Boundary-node groups for every (source worker, destination worker) pair.
/// Per destination, the groups disjointly cover exactly the boundary nodes
/// that destination needs; the group count per destination is
/// max(1, round((1-ratio) * candidates)), so ratio is the fractional volume
/// reduction. Group members are sorted; groups are ordered by smallest member.
struct GroupingPlan {
  using Group = std::vector<NodeId>;
  using GroupList = std::vector<Group>;

  double ratio = 0.0;
  // groups[k][j]: groups worker k sends to worker j (empty when j == k or no
  // boundary nodes face j).
  std::vector<std::vector<GroupList>> groups;

  std::size_t total_groups() const;
};

std::size_t groups_for(double ratio, std::size_t candidates);

/// chunk: candidates sorted by projection onto their mean feature direction
/// (ties by node id) and cut into near-equal contiguous chunks. kmeans:
/// seeded Lloyd iterations (max 20) over feature rows; empty clusters are
/// re-seeded from the point farthest from its centroid. Deterministic given
/// the seed.
GroupingPlan build_grouping(const Partition& partition, const Matrix& features,
                            double ratio, GroupingStrategy strategy, std::uint64_t seed);

/// Arithmetic mean of the group rows (computed as a uniform weighted sum, so
/// degenerate calls line up bitwise with the other condensers).
std::vector<double> condense_mean(const Matrix& rows);

/// Degree-weighted mean; all-zero degrees fall back to uniform weights.
std::vector<double> condense_weighted(const Matrix& rows, std::span<const double> degrees);

struct AttentionResult {
  std::vector<double> super;
  std::vector<double> weights;
};

/// Softmax(a . h_v) weighted sum; returns the weights for the auxiliary update.
AttentionResult condense_attention(const Matrix& rows, std::span<const double> attention);

/// One exact gradient step of the attention vector on the local reconstruction
/// objective J = sum_v ||h_v - s||^2, differentiated through the softmax.
void update_attention_param(std::vector<double>& attention, const Matrix& rows,
                            std::span<const double> super, std::span<const double> weights,
                            double aux_lr);

/// Condensed message: one vector per group plus the group membership tables the
/// receiver needs to scatter it.
struct SuperNodeGroup {
  std::uint32_t id = 0;
  std::vector<NodeId> members;
  std::vector<double> super;
};

struct SuperNodeBatch {
  int layer = 0;
  int source = 0;
  int destination = 0;
  std::vector<SuperNodeGroup> groups;
};

/// Assigns each group's super vector to every member row of `out`:
/// out.row(row_of(member)) = super. row_of returning WorkerView::npos means the
/// id is unknown and raises ContractError.
void reconstruct(const SuperNodeBatch& batch,
                 const std::function<std::size_t(NodeId)>& row_of, Matrix& out);

}  // namespace supersage
