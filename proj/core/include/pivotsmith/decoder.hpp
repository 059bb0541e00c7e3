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
// Monotone phrase decoder: picks the segmentation of the input into table
// source phrases with the highest summed log-linear score. No reordering,
// no language model.

#ifndef PIVOTSMITH_DECODER_HPP_
#define PIVOTSMITH_DECODER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pivotsmith/phrase_table.hpp"
#include "pivotsmith/weights.hpp"

namespace pivotsmith {

struct DecodeConfig {
  LogLinearWeights weights;
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
  // Log-score charged per token copied through untranslated.
  double unknown_word_penalty = -10.0;
};

struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string target;
  double score = 0.0;
  bool passthrough = false;
};

struct Decoding {
  std::vector<std::string> tokens;
  std::vector<Segment> segments;
  double score = 0.0;
};

class MonotoneDecoder {
 public:
  struct Option {
    std::string target;
    double score = 0.0;
  };

  // Throws std::invalid_argument if a feature has no weight or
  // max_phrase_len is 0.
  MonotoneDecoder(const PhraseTable &table, DecodeConfig config);

  // Equal totals prefer a longer final phrase; each span uses its best
  // target (smaller target on equal scores).
  Decoding decode(std::span<const std::string> sentence) const;

  // Best option for a source phrase given as space-joined text.
  const Option *best_option(std::string_view source) const;
  // True when the single token has no one-word table entry and so may be
  // copied through.
  bool is_unknown(std::string_view token) const { return best_option(token) == nullptr; }
  const DecodeConfig &config() const { return config_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  DecodeConfig config_;
  std::unordered_map<std::string, Option, Hash, std::equal_to<>> best_;
};

std::vector<std::string> decode_monotone(std::span<const std::string> sentence,
                                         const PhraseTable &table, const DecodeConfig &config);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_DECODER_HPP_
