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

#ifndef PIVOTSMITH_WEIGHTS_HPP_
#define PIVOTSMITH_WEIGHTS_HPP_

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pivotsmith/phrase_table.hpp"

namespace pivotsmith {

// Floor applied to scores before taking logs.
inline constexpr double kProbabilityFloor = 1e-9;

// One weight per feature name. A default-constructed object weights every
// feature 1.0; strict() weights have no fallback, so every feature scored
// must be named explicitly.
class LogLinearWeights {
 public:
  LogLinearWeights() = default;
  static LogLinearWeights strict() {
    LogLinearWeights w;
    w.fallback_.reset();
    return w;
  }

  void set(const std::string &name, double weight);
  void set_fallback(std::optional<double> weight) { fallback_ = weight; }
  const std::optional<double> &fallback() const { return fallback_; }
  const std::map<std::string, double, std::less<>> &explicit_weights() const {
    return values_;
  }

  // Throws std::invalid_argument when `name` has no weight.
  double get(std::string_view name) const;
  // Core weights followed by one weight per extra column.
  std::vector<double> resolve(const Manifest &manifest) const;

 private:
  std::map<std::string, double, std::less<>> values_;
  std::optional<double> fallback_ = 1.0;
};

// "name = value" lines, '#' comments. "default = x" sets the fallback;
// without it the result is strict. Throws FormatError.
LogLinearWeights parse_weights(std::istream &in);
LogLinearWeights read_weights_file(const std::string &path);

// sum_k weight_k * ln(max(score_k, epsilon)) over core scores then extras.
double loglinear_score(const ScoreSet &scores, std::span<const double> resolved_weights,
                       double epsilon = kProbabilityFloor);
double loglinear_score(const PhraseEntry &entry, const Manifest &manifest,
                       const LogLinearWeights &weights, double epsilon = kProbabilityFloor);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_WEIGHTS_HPP_
