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
//
// Copyright 2026 The pivotsmith Authors.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pivotsmith/bleu.hpp"

namespace pivotsmith {
namespace {

Sentence s(const std::string &text) {
  Sentence out;
  std::istringstream in(text);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

TEST(Bleu, Identity) {
  std::vector<Sentence> h{s("the cat sat on the mat"), s("a b c d e")};
  std::vector<std::vector<Sentence>> r{{h[0]}, {h[1]}};
  EXPECT_DOUBLE_EQ(bleu4(h, r), 1.0);
}

TEST(Bleu, BrevityPenaltyByHand) {
  std::vector<Sentence> h{s("a b c d")};
  std::vector<std::vector<Sentence>> r{{s("a b c d e")}};
  BleuResult res = corpus_bleu(h, r);
  EXPECT_NEAR(res.brevity_penalty, std::exp(1.0 - 5.0 / 4.0), 1e-15);
  EXPECT_NEAR(res.bleu, 0.778801, 1e-6);
  for (double p : res.precisions) EXPECT_DOUBLE_EQ(p, 1.0);
}

TEST(Bleu, ZeroFourGramPrecisionGivesZero) {
  std::vector<Sentence> h{s("a b c d")};
  std::vector<std::vector<Sentence>> r{{s("a b c e")}};
  EXPECT_EQ(bleu4(h, r), 0.0);
}

TEST(Bleu, ClippingAgainstMaxReferenceCount) {
  // "the" appears 7 times; the best reference has it twice.
  std::vector<Sentence> h{s("the the the the the the the")};
  std::vector<std::vector<Sentence>> r{{s("the cat is on the mat"), s("there is a cat on the mat")}};
  BleuResult res = corpus_bleu(h, r);
  EXPECT_EQ(res.stats.matches[0], 2u);
  EXPECT_EQ(res.stats.totals[0], 7u);
}

TEST(Bleu, ClosestReferenceLengthPrefersShorter) {
  std::vector<Sentence> h{s("a b c d e")};
  std::vector<std::vector<Sentence>> r{{s("a b c d e f g"), s("a b c")}};
  EXPECT_EQ(corpus_bleu(h, r).stats.ref_length, 3u);
  std::vector<std::vector<Sentence>> r2{{s("a b c d e f"), s("a b c d")}};
  EXPECT_EQ(corpus_bleu(h, r2).stats.ref_length, 4u);
}

TEST(Bleu, PermutationAndDuplicationInvariant) {
  std::mt19937 rng(9);
  std::vector<Sentence> h;
  std::vector<std::vector<Sentence>> r;
  for (int i = 0; i < 50; ++i) {
    Sentence a, b;
    for (int k = 0; k < 6 + static_cast<int>(rng() % 6); ++k) a.push_back("w" + std::to_string(rng() % 5));
    b = a;
    if (!b.empty() && rng() % 2) b[rng() % b.size()] = "zz";
    if (rng() % 3 == 0) b.push_back("tail");
    h.push_back(a);
    r.push_back({b});
  }
  double base = bleu4(h, r);
  EXPECT_GT(base, 0.0);
  std::vector<std::size_t> idx(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Sentence> hp;
  std::vector<std::vector<Sentence>> rp;
  for (std::size_t i : idx) {
    hp.push_back(h[i]);
    rp.push_back(r[i]);
  }
  EXPECT_DOUBLE_EQ(bleu4(hp, rp), base);
  std::vector<Sentence> hd = h;
  std::vector<std::vector<Sentence>> rd = r;
  hd.insert(hd.end(), h.begin(), h.end());
  rd.insert(rd.end(), r.begin(), r.end());
  EXPECT_NEAR(bleu4(hd, rd), base, 1e-15);
}

TEST(Bleu, Errors) {
  std::vector<Sentence> none;
  std::vector<std::vector<Sentence>> no_refs;
  EXPECT_THROW(bleu4(none, no_refs), std::invalid_argument);
  std::vector<Sentence> h{s("a")};
  EXPECT_THROW(bleu4(h, no_refs), std::invalid_argument);
  std::vector<std::vector<Sentence>> empty_set{{}};
  EXPECT_THROW(bleu4(h, empty_set), std::invalid_argument);
}

}  // namespace
}  // namespace pivotsmith
