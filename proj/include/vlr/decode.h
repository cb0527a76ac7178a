// Copyright 2026 The VLR Authors.
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

// Path ranking over lattices, in the log domain.
//
// Scores accumulate left to right as ((V + log a) + log e), so a path's total
// is bit-identical however it is reached. Ties prefer the lowest final region,
// then the lowest predecessor at each step; equivalently, among equal scores
// the path whose reversed region sequence is lexicographically smallest wins.

#ifndef VLR_DECODE_H_
#define VLR_DECODE_H_

#include <vector>

#include "vlr/lattice.h"
#include "vlr/sgraph_io.h"

namespace vlr {

// Forward pass of the 1-best recurrence. scores[t][r] is the best log score
// of any partial path ending in region r at layer t; backptrs[t][r] is its
// predecessor (unused at t = 0).
struct Trellis {
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> backptrs;
};

Trellis ForwardPass(const Lattice &lattice);

struct ViterbiPath {
  std::vector<int> regions;
  // Per layer: log emission (plus log prior at layer 0, plus log transition
  // from layer 1 on).
  std::vector<double> step_log_scores;
  double total_log_score = 0.0;
  // Multiplied probabilities: one emission per layer plus one per relation
  // transition. Identity transitions and the prior are excluded.
  int num_factors = 0;
  int rank = 1;
  bool feasible = true;

  int final_region() const { return regions.back(); }
};

// Always returns a path; infeasible lattices yield feasible = false and the
// tie-break path.
ViterbiPath Viterbi(const Lattice &lattice);

// Parallel list Viterbi: keeps the n best partial paths per (layer, region).
// Returns up to n distinct feasible paths in ranking order.
std::vector<ViterbiPath> ListViterbi(const Lattice &lattice, int n);

// exp(total / num_factors); 0 for infeasible paths.
double GeometricMeanScore(const ViterbiPath &path);

// {rank, regions, step_log_scores, total_log_score, geometric_mean}
Json PathToJson(const ViterbiPath &path);

}  // namespace vlr

#endif  // VLR_DECODE_H_
