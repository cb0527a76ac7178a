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

#include "vlr/grounding.h"

#include <algorithm>
#include <random>

#include "doctest.h"

namespace vlr {
namespace {

AttentionMap Att(std::vector<double> w) { return AttentionMap{std::move(w)}; }

TEST_CASE("iou") {
  const Box a{0, 0, 10, 10};
  CHECK(Iou(a, a) == 1.0);
  CHECK(Iou(a, Box{5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0));
  CHECK(Iou(a, Box{20, 20, 30, 30}) == 0.0);
  CHECK(Iou(a, Box{5, 5, 5, 9}) == 0.0);
  CHECK(Iou(Box{5, 5, 5, 9}, Box{5, 5, 5, 9}) == 0.0);
}

TEST_CASE("iou is symmetric") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng), p = u(rng), q = u(rng);
    const Box a{x, y, x + 1 + u(rng), y + 1 + u(rng)};
    const Box b{p, q, p + 1 + u(rng), q + 1 + u(rng)};
    CHECK(Iou(a, b) == Iou(b, a));
    CHECK(Iou(a, b) <= 1.0);
  }
}

const std::vector<Box> kRegions = {{0, 0, 10, 10},   {20, 0, 30, 10},
                                   {40, 0, 50, 10},  {60, 0, 70, 10}};

TEST_CASE("iou grounding score") {
  GroundingConfig cfg;
  const std::vector<Box> gt = {{61, 0, 70, 10}};  // IoU 0.9 with region 3
  CHECK(IouGroundingScore(Att({0, 0, 0, 1.0}), gt, kRegions, cfg) == 1.0);
  const std::vector<Box> gt1 = {{20, 0, 30, 10}};
  CHECK(IouGroundingScore(Att({0, 0.5, 0.5, 0}), gt1, kRegions, cfg) == 0.5);
  CHECK(IouGroundingScore(Att({1.0, 0, 0, 0}), gt1, kRegions, cfg) == 0.0);
  // A region matching two boxes counts once.
  const std::vector<Box> twice = {{20, 0, 30, 10}, {21, 0, 30, 10}};
  CHECK(IouGroundingScore(Att({0, 1.0, 0, 0}), twice, kRegions, cfg) == 1.0);
  // IoU exactly at the threshold does not match.
  const std::vector<Box> half = {{20, 0, 40, 10}};
  CHECK(Iou(kRegions[1], half[0]) == 0.5);
  CHECK(IouGroundingScore(Att({0, 1.0, 0, 0}), half, kRegions, cfg) == 0.0);
}

TEST_CASE("gqa-style score double-counts overlapping boxes") {
  GroundingConfig cfg;
  const std::vector<Box> one = {{0, 0, 10, 10}};
  CHECK(GqaStyleGrounding(Att({1.0, 0, 0, 0}), one, kRegions, cfg) == 1.0);
  const std::vector<Box> two = {{0, 0, 10, 10}, {1, 0, 10, 10}};
  CHECK(GqaStyleGrounding(Att({1.0, 0, 0, 0}), two, kRegions, cfg) == 2.0);
  CHECK(IouGroundingScore(Att({1.0, 0, 0, 0}), two, kRegions, cfg) == 1.0);
  CHECK(GqaStyleGrounding(Att({0, 0, 1.0, 0}), two, kRegions, cfg) == 0.0);
}

TEST_CASE("precision, recall and f1") {
  GroundingConfig cfg;
  const std::vector<Box> gt = {{0, 0, 10, 10}};
  PrfScore s = GroundingPrf(Att({1.0, 0, 0, 0}), gt, kRegions, cfg);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);
  s = GroundingPrf(Att({0.5, 0.5, 0, 0}), gt, kRegions, cfg);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  s = GroundingPrf(Att({0, 0, 0, 0}), gt, kRegions, cfg);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);
  s = GroundingPrf(Att({1.0, 0, 0, 0}), {}, kRegions, cfg);
  CHECK(s.recall == 0.0);
}

TEST_CASE("raising the threshold never raises a score") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Box> regions, gt;
    for (int i = 0; i < 5; ++i) {
      const double x = 30 * u(rng), y = 30 * u(rng);
      regions.push_back({x, y, x + 5 + 10 * u(rng), y + 5 + 10 * u(rng)});
    }
    for (int i = 0; i < 3; ++i) {
      const double x = 30 * u(rng), y = 30 * u(rng);
      gt.push_back({x, y, x + 5 + 10 * u(rng), y + 5 + 10 * u(rng)});
    }
    AttentionMap att = Att({0.2, 0.2, 0.2, 0.2, 0.2});
    double prev_iou = 2, prev_gqa = 10, prev_f1 = 2;
    for (double t : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      GroundingConfig cfg{t};
      const double iou = IouGroundingScore(att, gt, regions, cfg);
      const double gqa = GqaStyleGrounding(att, gt, regions, cfg);
      const double f1 = GroundingPrf(att, gt, regions, cfg).f1;
      CHECK(iou <= prev_iou);
      CHECK(gqa <= prev_gqa);
      CHECK(f1 <= prev_f1);
      CHECK(gqa >= iou - 1e-12);
      prev_iou = iou;
      prev_gqa = gqa;
      prev_f1 = f1;
    }
  }
}

TEST_CASE("scores are invariant to region permutation") {
  GroundingConfig cfg;
  const std::vector<Box> gt = {{0, 0, 10, 10}, {41, 0, 50, 10}};
  const std::vector<double> w = {0.25, 0.25, 0.5, 0.0};
  std::vector<int> perm = {0, 1, 2, 3};
  const double iou = IouGroundingScore(Att(w), gt, kRegions, cfg);
  const double gqa = GqaStyleGrounding(Att(w), gt, kRegions, cfg);
  const double f1 = GroundingPrf(Att(w), gt, kRegions, cfg).f1;
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<Box> boxes(4);
    std::vector<double> pw(4);
    for (int i = 0; i < 4; ++i) {
      boxes[perm[i]] = kRegions[i];
      pw[perm[i]] = w[i];
    }
    CHECK(IouGroundingScore(Att(pw), gt, boxes, cfg) == doctest::Approx(iou));
    CHECK(GqaStyleGrounding(Att(pw), gt, boxes, cfg) == doctest::Approx(gqa));
    CHECK(GroundingPrf(Att(pw), gt, boxes, cfg).f1 == doctest::Approx(f1));
  }
}

TEST_CASE("annotations round-trip and pool") {
  GroundingAnnotation a;
  a.qid = "q";
  a.question = {{0, 0, 1, 1}};
  a.answer = {{2, 2, 3, 3}};
  a.full_answer = {{0, 0, 1, 1}};
  CHECK(a.Pooled().size() == 3);
  const GroundingAnnotation back = AnnotationFromJson(AnnotationToJson(a));
  CHECK(back.qid == "q");
  CHECK(back.answer == a.answer);
  GroundingConfig bad{0.0};
  CHECK_THROWS_AS(bad.Validate(), Error);
}

}  // namespace
}  // namespace vlr
