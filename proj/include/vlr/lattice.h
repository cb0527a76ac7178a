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

// VQA lattices: one emission layer per region-describing operation, linked by
// identity (attribute steps) or hollow relation (relate steps) transitions.

#ifndef VLR_LATTICE_H_
#define VLR_LATTICE_H_

#include <optional>
#include <string>
#include <vector>

#include "vlr/diagnostics.h"
#include "vlr/opseq.h"
#include "vlr/sgraph.h"
#include "vlr/sgraph_io.h"

namespace vlr {

// Emissions and non-structural relation entries are floored to this so that
// only structurally forbidden moves are impossible.
inline constexpr double kProbabilityFloor = 1e-12;

struct LatticeLayer {
  EmissionVector emission;
  // Absent on layer 0.
  std::optional<TransitionMatrix> transition;
  OperationTuple source;
};

struct Lattice {
  int num_regions = 0;
  std::vector<LatticeLayer> layers;
  double prior = 1.0;
  // The answer operation this lattice feeds.
  OperationTuple terminal_op;

  int num_layers() const { return static_cast<int>(layers.size()); }
};

// One lattice, or two for and/or/compare programs. Throws BuildError when a
// branch is empty or does not start with an emission-producing tuple.
std::vector<Lattice> BuildLattices(const OperationSequence &seq,
                                   const SceneGraph &sg,
                                   Diagnostics *diag = nullptr);

// Object name constraining the final region (last select/relate/verify-object
// layer), or empty when unconstrained.
std::string FinalObjectName(const Lattice &lattice,
                            const Vocabulary &vocabulary);

// {"prior", "floor", "layers": [{"emissions", "transition_kind",
//  "transition_nonzeros": [[from, to, p], ..], "source_tuple"}]}. Relation
// entries at the floor are omitted from transition_nonzeros.
Json LatticeToJson(const Lattice &lattice);

}  // namespace vlr

#endif  // VLR_LATTICE_H_
