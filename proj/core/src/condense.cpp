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

#include "supersage/condense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "supersage/errors.hpp"
#include "supersage/rng.hpp"

namespace supersage {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<double> weighted_sum(const Matrix& rows, std::span<const double> weights) {
  std::vector<double> out(rows.cols(), 0.0);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const auto row = rows.row(i);
    const double w = weights[i];
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * row[c];
  }
  return out;
}

GroupingPlan::GroupList chunk_groups(const std::vector<NodeId>& candidates,
                                     const Matrix& features, std::size_t m) {
  const std::size_t n = candidates.size();
  const std::size_t dim = features.cols();

  std::vector<double> direction(dim, 0.0);
  for (NodeId v : candidates) {
    const auto row = features.row(v);
    for (std::size_t c = 0; c < dim; ++c) direction[c] += row[c];
  }
  double norm_sq = 0.0;
  for (double x : direction) norm_sq += x * x;

  std::vector<std::pair<double, NodeId>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = candidates[i];
    const double proj = norm_sq > 0.0 ? dot(features.row(v), direction) : 0.0;
    keyed[i] = {proj, v};
  }
  std::sort(keyed.begin(), keyed.end());

  GroupingPlan::GroupList groups(m);
  for (std::size_t g = 0; g < m; ++g) {
    const std::size_t begin = g * n / m;
    const std::size_t end = (g + 1) * n / m;
    for (std::size_t i = begin; i < end; ++i) groups[g].push_back(keyed[i].second);
    std::sort(groups[g].begin(), groups[g].end());
  }
  return groups;
}

GroupingPlan::GroupList kmeans_groups(const std::vector<NodeId>& candidates,
                                      const Matrix& features, std::size_t m,
                                      std::uint64_t seed) {
  const std::size_t n = candidates.size();
  const std::size_t dim = features.cols();
  constexpr int kMaxIterations = 20;

  Rng rng(seed);
  std::vector<std::size_t> init(n);
  std::iota(init.begin(), init.end(), std::size_t{0});
  rng.shuffle(init);

  Matrix centroids(m, dim);
  for (std::size_t c = 0; c < m; ++c) {
    const auto src = features.row(candidates[init[c]]);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
  }

  std::vector<std::size_t> assignment(n, 0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = features.row(candidates[i]);
      std::size_t best = 0;
      double best_dist = sq_dist(row, centroids.row(0));
      for (std::size_t c = 1; c < m; ++c) {
        const double d = sq_dist(row, centroids.row(c));
        if (d < best_dist) {
          best = c;
          best_dist = d;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }

    // Re-seed empty clusters from the point farthest from its own centroid.
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t a : assignment) ++counts[a];
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] > 0) continue;
      std::size_t farthest = 0;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignment[i]] <= 1) continue;
        const double d = sq_dist(features.row(candidates[i]), centroids.row(assignment[i]));
        if (d > far_dist) {
          far_dist = d;
          farthest = i;
        }
      }
      --counts[assignment[farthest]];
      assignment[farthest] = c;
      counts[c] = 1;
      changed = true;
    }

    centroids.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = features.row(candidates[i]);
      auto dst = centroids.row(assignment[i]);
      for (std::size_t c = 0; c < dim; ++c) dst[c] += row[c];
    }
    counts.assign(m, 0);
    for (std::size_t a : assignment) ++counts[a];
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] == 0) continue;
      auto row = centroids.row(c);
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
    }
    if (!changed) break;
  }

  GroupingPlan::GroupList groups(m);
  for (std::size_t i = 0; i < n; ++i) groups[assignment[i]].push_back(candidates[i]);
  for (auto& g : groups) std::sort(g.begin(), g.end());
  groups.erase(std::remove_if(groups.begin(), groups.end(),
                              [](const auto& g) { return g.empty(); }),
               groups.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

}  // namespace

std::size_t GroupingPlan::total_groups() const {
  std::size_t total = 0;
  for (const auto& per_dest : groups) {
    for (const auto& list : per_dest) total += list.size();
  }
  return total;
}

std::size_t groups_for(double ratio, std::size_t candidates) {
  const auto rounded =
      static_cast<long long>(std::llround((1.0 - ratio) * static_cast<double>(candidates)));
  return static_cast<std::size_t>(std::max(1ll, rounded));
}

GroupingPlan build_grouping(const Partition& partition, const Matrix& features,
                            double ratio, GroupingStrategy strategy, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ParameterError("compression ratio r must lie in (0, 1)");
  }
  const auto k = static_cast<std::size_t>(partition.num_workers);
  GroupingPlan plan;
  plan.ratio = ratio;
  plan.groups.assign(k, std::vector<GroupingPlan::GroupList>(k));
  for (std::size_t src = 0; src < k; ++src) {
    for (std::size_t dst = 0; dst < k; ++dst) {
      const auto& candidates = partition.boundary_to[src][dst];
      if (candidates.empty()) continue;
      const std::size_t m = std::min(groups_for(ratio, candidates.size()), candidates.size());
      if (strategy == GroupingStrategy::Chunk) {
        plan.groups[src][dst] = chunk_groups(candidates, features, m);
      } else {
        plan.groups[src][dst] =
            kmeans_groups(candidates, features, m, Rng::derive(seed, 500 + src * k + dst));
      }
    }
  }
  return plan;
}

std::vector<double> condense_mean(const Matrix& rows) {
  if (rows.rows() == 0) throw ContractError("condense_mean on an empty group");
  const std::vector<double> weights(rows.rows(), 1.0 / static_cast<double>(rows.rows()));
  return weighted_sum(rows, weights);
}

std::vector<double> condense_weighted(const Matrix& rows, std::span<const double> degrees) {
  if (rows.rows() == 0) throw ContractError("condense_weighted on an empty group");
  if (degrees.size() != rows.rows()) throw ShapeError("degree count mismatch");
  double total = 0.0;
  for (double d : degrees) {
    if (d < 0.0) throw ContractError("negative degree in condense_weighted");
    total += d;
  }
  std::vector<double> weights(rows.rows());
  if (total == 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(rows.rows()));
  } else {
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = degrees[i] / total;
  }
  return weighted_sum(rows, weights);
}

AttentionResult condense_attention(const Matrix& rows, std::span<const double> attention) {
  if (rows.rows() == 0) throw ContractError("condense_attention on an empty group");
  if (attention.size() != rows.cols()) {
    throw ShapeError("attention vector dimension mismatch");
  }
  const std::size_t n = rows.rows();
  std::vector<double> scores(n);
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = dot(attention, rows.row(i));
    max_score = std::max(max_score, scores[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = std::exp(scores[i] - max_score);
    sum += scores[i];
  }
  for (double& s : scores) s /= sum;

  AttentionResult result;
  result.super = weighted_sum(rows, scores);
  result.weights = std::move(scores);
  return result;
}

void update_attention_param(std::vector<double>& attention, const Matrix& rows,
                            std::span<const double> super, std::span<const double> weights,
                            double aux_lr) {
  const std::size_t n = rows.rows();
  const std::size_t dim = rows.cols();
  if (super.size() != dim || weights.size() != n || attention.size() != dim) {
    throw ShapeError("update_attention_param dimension mismatch");
  }
  // dJ/ds for J = sum_v ||h_v - s||^2.
  std::vector<double> g_s(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    double sum_h = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum_h += rows(i, c);
    g_s[c] = 2.0 * (static_cast<double>(n) * super[c] - sum_h);
  }
  // Through the softmax: dJ/da = sum_u alpha_u (g_s . h_u) (h_u - s).
  std::vector<double> grad(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rows.row(i);
    const double coef = weights[i] * dot(g_s, row);
    for (std::size_t c = 0; c < dim; ++c) grad[c] += coef * (row[c] - super[c]);
  }
  for (std::size_t c = 0; c < dim; ++c) attention[c] -= aux_lr * grad[c];
}

void reconstruct(const SuperNodeBatch& batch,
                 const std::function<std::size_t(NodeId)>& row_of, Matrix& out) {
  for (const SuperNodeGroup& group : batch.groups) {
    if (group.super.size() != out.cols()) {
      throw ShapeError("super node dimension does not match halo buffer");
    }
    for (NodeId member : group.members) {
      const std::size_t row = row_of(member);
      if (row == WorkerView::npos || row >= out.rows()) {
        throw ContractError("reconstruct: unknown node id " + std::to_string(member));
      }
      std::copy(group.super.begin(), group.super.end(), out.row(row).begin());
    }
  }
}

}  // namespace supersage
