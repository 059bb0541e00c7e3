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
//
// Corpus-level BLEU-4 without smoothing.

#ifndef PIVOTSMITH_BLEU_HPP_
#define PIVOTSMITH_BLEU_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pivotsmith {

inline constexpr std::size_t kBleuOrder = 4;

using Sentence = std::vector<std::string>;

// Sufficient statistics for one or more sentences. Adding is commutative.
struct BleuStats {
  std::array<std::size_t, kBleuOrder> matches{};
  std::array<std::size_t, kBleuOrder> totals{};
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  BleuStats &operator+=(const BleuStats &other);
};

struct BleuResult {
  double bleu = 0.0;
  std::array<double, kBleuOrder> precisions{};
  double brevity_penalty = 0.0;
  BleuStats stats;
};

// Clipped n-gram counts against the per-n-gram maximum over references;
// the effective reference length is the closest one, shorter on ties.
// Throws std::invalid_argument if refs is empty.
BleuStats sentence_stats(const Sentence &hyp, std::span<const Sentence> refs);

BleuResult bleu_from_stats(const BleuStats &stats);

// refs[i] holds the references for hyps[i]. Throws std::invalid_argument on
// an empty corpus, mismatched sizes, or a hypothesis with no references.
BleuResult corpus_bleu(std::span<const Sentence> hyps, std::span<const std::vector<Sentence>> refs);
double bleu4(std::span<const Sentence> hyps, std::span<const std::vector<Sentence>> refs);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_BLEU_HPP_
