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

#include "vlr/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vlr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-domain copy of a lattice. Identity transitions are kept implicit.
struct LogLattice {
  int n = 0;
  double log_prior = 0.0;
  std::vector<std::vector<double>> emissions;
  // Empty for layer 0 and identity layers.
  std::vector<std::vector<double>> transitions;
  std::vector<bool> identity;
  int num_factors = 0;
};

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

LogLattice ToLog(const Lattice &lattice) {
  LogLattice out;
  out.n = lattice.num_regions;
  out.log_prior = SafeLog(lattice.prior);
  const size_t t_count = lattice.layers.size();
  out.emissions.resize(t_count);
  out.transitions.resize(t_count);
  out.identity.assign(t_count, false);
  for (size_t t = 0; t < t_count; ++t) {
    const LatticeLayer &layer = lattice.layers[t];
    auto &le = out.emissions[t];
    le.resize(out.n);
    for (int r = 0; r < out.n; ++r) le[r] = SafeLog(layer.emission.values[r]);
    ++out.num_factors;
    if (t == 0) continue;
    if (!layer.transition) throw Error("layer without a transition");
    if (layer.transition->kind == TransitionKind::kIdentity) {
      out.identity[t] = true;
      continue;
    }
    ++out.num_factors;
    auto &la = out.transitions[t];
    la.resize(layer.transition->values.size());
    for (size_t i = 0; i < la.size(); ++i) {
      la[i] = SafeLog(layer.transition->values[i]);
    }
  }
  return out;
}

double LogTransition(const LogLattice &lat, size_t t, int from, int to) {
  if (lat.identity[t]) return from == to ? 0.0 : kNegInf;
  return lat.transitions[t][static_cast<size_t>(from) * lat.n + to];
}

ViterbiPath TracePath(const LogLattice &lat, const std::vector<int> &regions,
                      double total) {
  ViterbiPath path;
  path.regions = regions;
  path.total_log_score = total;
  path.num_factors = lat.num_factors;
  path.feasible = total != kNegInf;
  path.step_log_scores.resize(regions.size());
  for (size_t t = 0; t < regions.size(); ++t) {
    const int r = regions[t];
    if (t == 0) {
      path.step_log_scores[t] = lat.emissions[0][r] + lat.log_prior;
    } else {
      path.step_log_scores[t] =
          LogTransition(lat, t, regions[t - 1], r) + lat.emissions[t][r];
    }
  }
  return path;
}

Trellis Forward(const LogLattice &lat) {
  const size_t t_count = lat.emissions.size();
  const int n = lat.n;
  Trellis trellis;
  trellis.scores.assign(t_count, std::vector<double>(n, kNegInf));
  trellis.backptrs.assign(t_count, std::vector<int>(n, 0));
  for (int r = 0; r < n; ++r) {
    trellis.scores[0][r] = lat.emissions[0][r] + lat.log_prior;
  }
  for (size_t t = 1; t < t_count; ++t) {
    const auto &prev = trellis.scores[t - 1];
    auto &cur = trellis.scores[t];
    auto &back = trellis.backptrs[t];
    const auto &le = lat.emissions[t];
    if (lat.identity[t]) {
      for (int r = 0; r < n; ++r) {
        const double v = (prev[r] + 0.0) + le[r];
        cur[r] = v;
        // With every candidate impossible the tie-break picks region 0.
        back[r] = v == kNegInf ? 0 : r;
      }
      continue;
    }
    const auto &la = lat.transitions[t];
    for (int r = 0; r < n; ++r) {
      double best = kNegInf;
      int arg = 0;
      for (int x = 0; x < n; ++x) {
        const double v = (prev[x] + la[static_cast<size_t>(x) * n + r]) + le[r];
        if (v > best) {
          best = v;
          arg = x;
        }
      }
      cur[r] = best;
      back[r] = arg;
    }
  }
  return trellis;
}

struct Entry {
  double score;
  int prev_region;
  int prev_rank;
};

}  // namespace

Trellis ForwardPass(const Lattice &lattice) { return Forward(ToLog(lattice)); }

ViterbiPath Viterbi(const Lattice &lattice) {
  if (lattice.layers.empty()) throw Error("cannot decode an empty lattice");
  const LogLattice lat = ToLog(lattice);
  const Trellis trellis = Forward(lat);
  const size_t t_count = lat.emissions.size();
  const auto &last = trellis.scores.back();
  int end = 0;
  for (int r = 1; r < lat.n; ++r) {
    if (last[r] > last[end]) end = r;
  }
  std::vector<int> regions(t_count, 0);
  if (last[end] == kNegInf) return TracePath(lat, regions, kNegInf);
  regions[t_count - 1] = end;
  for (size_t t = t_count - 1; t > 0; --t) {
    regions[t - 1] = trellis.backptrs[t][regions[t]];
  }
  return TracePath(lat, regions, last[end]);
}

std::vector<ViterbiPath> ListViterbi(const Lattice &lattice, int n) {
  if (lattice.layers.empty()) throw Error("cannot decode an empty lattice");
  if (n < 1) throw Error("list size must be at least 1");
  const LogLattice lat = ToLog(lattice);
  const size_t t_count = lat.emissions.size();
  const int regions = lat.n;
  const size_t k = static_cast<size_t>(n);

  // lists[t][r]: best partial paths ending at (t, r), sorted by score desc,
  // then predecessor region, then predecessor rank.
  std::vector<std::vector<std::vector<Entry>>> lists(
      t_count, std::vector<std::vector<Entry>>(regions));
  for (int r = 0; r < regions; ++r) {
    const double v = lat.emissions[0][r] + lat.log_prior;
    if (v != kNegInf) lists[0][r].push_back({v, -1, -1});
  }

  auto better = [](const Entry &a, const Entry &b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.prev_region != b.prev_region) return a.prev_region < b.prev_region;
    return a.prev_rank < b.prev_rank;
  };

  std::vector<Entry> candidates;
  for (size_t t = 1; t < t_count; ++t) {
    const auto &le = lat.emissions[t];
    for (int r = 0; r < regions; ++r) {
      candidates.clear();
      auto extend = [&](int x) {
        const double la = LogTransition(lat, t, x, r);
        const auto &from = lists[t - 1][x];
        for (size_t j = 0; j < from.size(); ++j) {
          const double v = (from[j].score + la) + le[r];
          if (v != kNegInf) {
            candidates.push_back({v, x, static_cast<int>(j)});
          }
        }
      };
      if (lat.identity[t]) {
        extend(r);
      } else {
        for (int x = 0; x < regions; ++x) extend(x);
      }
      const size_t keep = std::min(k, candidates.size());
      std::partial_sort(candidates.begin(), candidates.begin() + keep,
                        candidates.end(), better);
      lists[t][r].assign(candidates.begin(), candidates.begin() + keep);
    }
  }

  struct Final {
    double score;
    int region;
    int rank;
  };
  std::vector<Final> finals;
  for (int r = 0; r < regions; ++r) {
    const auto &list = lists[t_count - 1][r];
    for (size_t j = 0; j < list.size(); ++j) {
      finals.push_back({list[j].score, r, static_cast<int>(j)});
    }
  }
  std::stable_sort(finals.begin(), finals.end(),
                   [](const Final &a, const Final &b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.region != b.region) return a.region < b.region;
                     return a.rank < b.rank;
                   });

  std::vector<ViterbiPath> out;
  std::set<std::vector<int>> seen;
  for (const Final &f : finals) {
    if (out.size() == k) break;
    std::vector<int> path(t_count);
    int region = f.region;
    int rank = f.rank;
    for (size_t t = t_count; t-- > 0;) {
      path[t] = region;
      const Entry &e = lists[t][region][rank];
      region = e.prev_region;
      rank = e.prev_rank;
    }
    if (!seen.insert(path).second) continue;
    ViterbiPath p = TracePath(lat, path, f.score);
    p.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(p));
  }
  return out;
}

double GeometricMeanScore(const ViterbiPath &path) {
  if (!path.feasible || path.num_factors <= 0) return 0.0;
  return std::exp(path.total_log_score / path.num_factors);
}

Json PathToJson(const ViterbiPath &path) {
  return {{"rank", path.rank},
          {"regions", path.regions},
          {"step_log_scores", path.step_log_scores},
          {"total_log_score", path.total_log_score},
          {"geometric_mean", GeometricMeanScore(path)}};
}

}  // namespace vlr
