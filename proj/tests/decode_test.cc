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

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracle/brute_force.h"

namespace vlr {
namespace {

LatticeLayer Layer(std::vector<double> emission) {
  LatticeLayer layer;
  layer.emission.values = std::move(emission);
  return layer;
}

TransitionMatrix Relation(int n, std::vector<double> values) {
  TransitionMatrix t;
  t.n = n;
  t.values = std::move(values);
  t.kind = TransitionKind::kRelation;
  return t;
}

// The two-region relation lattice used throughout.
Lattice RelationLattice() {
  Lattice l;
  l.num_regions = 2;
  l.layers.push_back(Layer({0.9, 0.1}));
  LatticeLayer second = Layer({0.3, 0.6});
  second.transition = Relation(2, {0.0, 0.8, 0.5, 0.0});
  l.layers.push_back(second);
  return l;
}

TEST_CASE("single layer picks the argmax") {
  Lattice l;
  l.num_regions = 2;
  l.layers.push_back(Layer({0.2, 0.7}));
  const ViterbiPath p = Viterbi(l);
  CHECK(p.regions == std::vector<int>{1});
  CHECK(p.total_log_score == doctest::Approx(std::log(0.7)));
  CHECK(p.num_factors == 1);
}

TEST_CASE("relation hop respects the hollow diagonal") {
  const ViterbiPath p = Viterbi(RelationLattice());
  CHECK(p.feasible);
  CHECK(p.regions == std::vector<int>{0, 1});
  CHECK(p.total_log_score == doctest::Approx(std::log(0.432)));
  CHECK(p.num_factors == 3);
  REQUIRE(p.step_log_scores.size() == 2);
  CHECK(p.step_log_scores[0] + p.step_log_scores[1] == doctest::Approx(p.total_log_score));
  CHECK(GeometricMeanScore(p) == doctest::Approx(std::cbrt(0.432)));
  CHECK(GeometricMeanScore(p) == doctest::Approx(0.7560).epsilon(1e-4));
}

TEST_CASE("identity transition stays on one region") {
  Lattice l;
  l.num_regions = 2;
  l.layers.push_back(Layer({0.9, 0.1}));
  LatticeLayer second = Layer({0.3, 0.6});
  second.transition = TransitionMatrix::Identity(2);
  l.layers.push_back(second);
  const ViterbiPath p = Viterbi(l);
  CHECK(p.regions == std::vector<int>{0, 0});
  CHECK(std::exp(p.total_log_score) == doctest::Approx(0.27));
  CHECK(p.num_factors == 2);
}

TEST_CASE("list viterbi on the relation lattice") {
  const Lattice l = RelationLattice();
  const auto two = ListViterbi(l, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].regions == std::vector<int>{0, 1});
  CHECK(two[1].regions == std::vector<int>{1, 0});
  CHECK(two[0].total_log_score == doctest::Approx(std::log(0.432)));
  CHECK(two[1].total_log_score == doctest::Approx(std::log(0.015)));
  CHECK(two[0].rank == 1);
  CHECK(two[1].rank == 2);
  CHECK(ListViterbi(l, 10).size() == 2);
  const auto one = ListViterbi(l, 1);
  REQUIRE(one.size() == 1);
  const ViterbiPath v = Viterbi(l);
  CHECK(one[0].regions == v.regions);
  CHECK(one[0].total_log_score == v.total_log_score);
  CHECK(one[0].step_log_scores == v.step_log_scores);
}

TEST_CASE("geometric mean") {
  ViterbiPath p;
  p.regions = {0, 0};
  p.step_log_scores = {std::log(0.9), std::log(0.4)};
  p.total_log_score = std::log(0.9) + std::log(0.4);
  p.num_factors = 2;
  CHECK(GeometricMeanScore(p) == doctest::Approx(0.6));
  p.total_log_score = 0.0;
  CHECK(GeometricMeanScore(p) == 1.0);
  p.feasible = false;
  CHECK(GeometricMeanScore(p) == 0.0);
}

TEST_CASE("infeasible lattice reports all-zero regions") {
  Lattice l;
  l.num_regions = 3;
  l.layers.push_back(Layer({0.5, 0.5, 0.5}));
  LatticeLayer second = Layer({0.5, 0.5, 0.5});
  second.transition = Relation(3, std::vector<double>(9, 0.0));
  l.layers.push_back(second);
  const ViterbiPath p = Viterbi(l);
  CHECK_FALSE(p.feasible);
  CHECK(p.regions == std::vector<int>{0, 0});
  CHECK(GeometricMeanScore(p) == 0.0);
  CHECK(ListViterbi(l, 5).empty());
}

TEST_CASE("ties go to the lowest final region, then predecessor") {
  Lattice l;
  l.num_regions = 3;
  l.layers.push_back(Layer({0.5, 0.5, 0.5}));
  LatticeLayer second = Layer({0.5, 0.5, 0.5});
  second.transition = Relation(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  l.layers.push_back(second);
  CHECK(Viterbi(l).regions == std::vector<int>{1, 0});
  const auto all = ListViterbi(l, 6);
  REQUIRE(all.size() == 6);
  const std::vector<std::vector<int>> expected = {{1, 0}, {2, 0}, {0, 1},
                                                  {2, 1}, {0, 2}, {1, 2}};
  for (size_t i = 0; i < all.size(); ++i) CHECK(all[i].regions == expected[i]);
}

TEST_CASE("scaling a layer shifts the score by log c") {
  Lattice l = RelationLattice();
  const ViterbiPath before = Viterbi(l);
  for (double &v : l.layers[1].emission.values) v *= 0.25;
  const ViterbiPath after = Viterbi(l);
  CHECK(after.regions == before.regions);
  CHECK(after.total_log_score ==
        doctest::Approx(before.total_log_score + std::log(0.25)));
}

TEST_CASE("lowering the winner's final emission swaps ranks 1 and 2") {
  Lattice l = RelationLattice();
  l.layers[1].emission.values[1] = 0.01;  // 0.9*0.8*0.01 = 0.0072 < 0.015
  const auto list = ListViterbi(l, 2);
  CHECK(list[0].regions == std::vector<int>{1, 0});
  CHECK(list[1].regions == std::vector<int>{0, 1});
  l.layers[1].emission.values[1] = 0.9;
  CHECK(Viterbi(l).regions == std::vector<int>{0, 1});
}

TEST_CASE("random lattices agree with enumeration") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Lattice l = oracle::RandomLattice(rng);
    const oracle::Scored want = oracle::BruteViterbi(l);
    const ViterbiPath got = Viterbi(l);
    REQUIRE(got.regions == want.regions);
    if (std::isfinite(want.log_score)) {
      CHECK(got.total_log_score == doctest::Approx(want.log_score).epsilon(1e-12));
    } else {
      CHECK_FALSE(got.feasible);
    }
    for (int n : {1, 3, 8}) {
      const auto list = ListViterbi(l, n);
      const auto top = oracle::BruteTopN(l, n);
      REQUIRE(list.size() == top.size());
      for (size_t i = 0; i < list.size(); ++i) {
        CHECK(list[i].regions == top[i].regions);
        CHECK(std::abs(list[i].total_log_score - top[i].log_score) < 1e-9);
      }
    }
  }
}

TEST_CASE("path JSON fields") {
  const Json j = PathToJson(Viterbi(RelationLattice()));
  CHECK(j.at("rank") == 1);
  CHECK(j.at("regions") == Json::array({0, 1}));
  CHECK(j.at("step_log_scores").size() == 2);
  CHECK(j.at("geometric_mean").get<double>() == doctest::Approx(std::cbrt(0.432)));
}

}  // namespace
}  // namespace vlr
