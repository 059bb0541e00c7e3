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

#include "pivotsmith/weights.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "pivotsmith/text.hpp"

namespace pivotsmith {

void LogLinearWeights::set(const std::string &name, double weight) {
  if (!std::isfinite(weight)) throw std::invalid_argument("weight for '" + name + "' not finite");
  values_[name] = weight;
}

double LogLinearWeights::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it != values_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw std::invalid_argument("no weight for feature '" + std::string(name) + "'");
}

std::vector<double> LogLinearWeights::resolve(const Manifest &manifest) const {
  std::vector<double> out;
  out.reserve(kNumCoreScores + manifest.num_extras());
  for (std::string_view n : kCoreScoreNames) out.push_back(get(n));
  for (const std::string &n : manifest.extras()) out.push_back(get(n));
  return out;
}

LogLinearWeights parse_weights(std::istream &in) {
  LogLinearWeights w = LogLinearWeights::strict();
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string, std::less<>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (std::size_t hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = text::trim(body);
    if (body.empty()) continue;
    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) throw FormatError(line_no, "expected 'name = value'");
    std::string_view name = text::trim(body.substr(0, eq));
    std::string_view value = text::trim(body.substr(eq + 1));
    double v = 0.0;
    if (name.empty()) throw FormatError(line_no, "empty weight name");
    if (!text::parse_double(value, v) || !std::isfinite(v)) {
      throw FormatError(line_no, "malformed weight value '" + std::string(value) + "'");
    }
    if (!seen.emplace(name).second) {
      throw FormatError(line_no, "duplicate weight '" + std::string(name) + "'");
    }
    if (name == "default") {
      w.set_fallback(v);
    } else {
      w.set(std::string(name), v);
    }
  }
  return w;
}

LogLinearWeights read_weights_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_weights(in);
}

double loglinear_score(const ScoreSet &scores, std::span<const double> w, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (w.size() != kNumCoreScores + scores.extras.size()) {
    throw std::invalid_argument("weight vector does not match the score columns");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < kNumCoreScores; ++k) {
    total += w[k] * std::log(std::max(scores.core[k], epsilon));
  }
  for (std::size_t k = 0; k < scores.extras.size(); ++k) {
    total += w[kNumCoreScores + k] * std::log(std::max(scores.extras[k], epsilon));
  }
  return total;
}

double loglinear_score(const PhraseEntry &entry, const Manifest &manifest,
                       const LogLinearWeights &weights, double epsilon) {
  std::vector<double> w = weights.resolve(manifest);
  return loglinear_score(entry.scores, w, epsilon);
}

}  // namespace pivotsmith
