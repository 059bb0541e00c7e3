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

#include <cmath>
#include <sstream>

#include "pivotsmith/text.hpp"
#include "pivotsmith/weights.hpp"

namespace pivotsmith {
namespace {

LogLinearWeights parse(const std::string &s) {
  std::istringstream in(s);
  return parse_weights(in);
}

TEST(Weights, ParseStrictAndDefault) {
  LogLinearWeights w = parse("# tuned\nphi_fwd = 0.5\nlex_fwd=0.25\n\n");
  EXPECT_FALSE(w.fallback().has_value());
  EXPECT_DOUBLE_EQ(w.get("phi_fwd"), 0.5);
  EXPECT_THROW(w.get("phi_bwd"), std::invalid_argument);

  LogLinearWeights d = parse("default = 0.1\nphi_fwd = 2\n");
  EXPECT_DOUBLE_EQ(d.get("anything"), 0.1);
  EXPECT_DOUBLE_EQ(d.get("phi_fwd"), 2.0);
}

TEST(Weights, ParseErrors) {
  EXPECT_THROW(parse("phi_fwd 0.5\n"), FormatError);
  EXPECT_THROW(parse("phi_fwd = x\n"), FormatError);
  EXPECT_THROW(parse("phi_fwd = 1\nphi_fwd = 2\n"), FormatError);
}

TEST(Weights, DefaultObjectWeightsEverythingOne) {
  LogLinearWeights w;
  Manifest m({"extra"});
  EXPECT_EQ(w.resolve(m), (std::vector<double>{1, 1, 1, 1, 1}));
  EXPECT_THROW(LogLinearWeights::strict().resolve(m), std::invalid_argument);
}

TEST(Weights, LogLinearScoreByHand) {
  ScoreSet s;
  s.core = {0.5, 0.5, 0.5, 0.5};
  std::vector<double> w{1, 1, 1, 1};
  // 4 ln 0.5
  EXPECT_NEAR(loglinear_score(s, w), -2.772588722239781, 1e-12);
  s.core = {0.0, 1, 1, 1};
  EXPECT_NEAR(loglinear_score(s, w), std::log(kProbabilityFloor), 1e-12);
  s.extras = {2.0};
  std::vector<double> w5{0, 0, 0, 0, 0.5};
  EXPECT_NEAR(loglinear_score(s, w5), 0.5 * std::log(2.0), 1e-12);
  EXPECT_THROW(loglinear_score(s, w), std::invalid_argument);
}

}  // namespace
}  // namespace pivotsmith
