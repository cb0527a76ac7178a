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

// Synthetic worlds with known ground truth.
//
// Each image has a discrete truth (one class per region, one attribute per
// category, a sparse set of relation edges). Questions are drawn from the
// template grammar by reading a witness chain off the truth; gold answers come
// from a set-based executor over the truth that shares no code with the
// lattice decoder. The probabilistic scene graph is derived from the truth
// with a noise model that leaks a fraction of each true probability to
// distractors. All random draws are independent of the noise level, so the
// same seed yields the same questions at every noise level.

#ifndef VLR_SYNTH_H_
#define VLR_SYNTH_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "vlr/dataset.h"
#include "vlr/opseq.h"
#include "vlr/sgraph.h"
#include "vlr/template_grammar.h"

namespace vlr {

struct SynthSpec {
  uint64_t seed = 42;
  int num_images = 10;
  int regions_per_image = 8;
  int questions_per_image = 10;
  int num_object_classes = 40;
  int num_attribute_categories = 3;
  int attributes_per_category = 6;
  int num_relation_classes = 8;
  // Expected outgoing relation edges per region.
  double relation_density = 1.5;
  // Fraction of probability mass that may leak from true entries, in [0, 1).
  double noise = 0.0;
  // Relative weight per structural category; missing ones default to 1.
  std::map<StructuralCategory, double> category_mix;
  // Image-level partition fractions; the rest is "train".
  double dev_fraction = 0.0;
  double test_fraction = 0.0;
  // Classes that must never be a gold answer.
  std::vector<std::string> answer_exclude;
  // If set, only "query name" questions whose answer is one of these.
  std::vector<std::string> answer_only;

  void Validate() const;
};

SynthSpec SynthSpecFromJson(const Json &j);
Json SynthSpecToJson(const SynthSpec &spec);

// Built-in vocabulary truncated to the spec's sizes.
std::shared_ptr<const Vocabulary> MakeSynthVocabulary(const SynthSpec &spec);

// Discrete ground truth of one image.
struct TruthImage {
  std::string image_id;
  std::vector<Box> boxes;
  std::vector<int> object_class;
  // attribute[r][k]: attribute index within category k.
  std::vector<std::vector<int>> attribute;
  // (subject, object, relation)
  std::vector<std::tuple<int, int, int>> edges;

  int num_regions() const { return static_cast<int>(boxes.size()); }
  bool HasEdge(int subject, int object, int relation) const;
};

// Witness chains per branch: each chain holds one region per layer-producing
// tuple. Set-based, exact, independent of lattices.
std::vector<std::vector<std::vector<int>>> WitnessChains(
    const OperationSequence &seq, const TruthImage &truth,
    const Vocabulary &vocabulary);

// Gold answer of a program over the truth ("unknown" if ill-posed).
std::string TruthAnswer(const OperationSequence &seq, const TruthImage &truth,
                        const Vocabulary &vocabulary);

// Probabilistic scene graph for a truth image. `leak_seed` fixes the noise
// draws; `noise` only scales them.
SceneGraph NoisySceneGraph(const TruthImage &truth,
                           std::shared_ptr<const Vocabulary> vocabulary,
                           double noise, double relation_density,
                           uint64_t leak_seed);

struct SynthOutput {
  Dataset dataset;
  std::vector<TruthImage> truth;
};

// Throws Error for invalid or unsatisfiable specs.
SynthOutput GenerateSynthetic(const SynthSpec &spec,
                              const TemplateGrammar &grammar);

inline Dataset GenSynthetic(const SynthSpec &spec,
                            const TemplateGrammar &grammar) {
  return GenerateSynthetic(spec, grammar).dataset;
}

}  // namespace vlr

#endif  // VLR_SYNTH_H_
