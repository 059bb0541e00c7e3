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

#include "pivotsmith/decoder.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pivotsmith {

MonotoneDecoder::MonotoneDecoder(const PhraseTable &table, DecodeConfig config)
    : config_(std::move(config)) {
  if (config_.max_phrase_len == 0) throw std::invalid_argument("max phrase length must be >= 1");
  std::vector<double> w = config_.weights.resolve(table.manifest());
  // Entries are sorted by target within a source, so the first maximum is
  // the smallest target.
  for (const PhraseEntry &e : table) {
    if (e.src.size() > config_.max_phrase_len) continue;
    double s = loglinear_score(e.scores, w);
    auto [it, inserted] = best_.try_emplace(e.src.text(), Option{e.tgt.text(), s});
    if (!inserted && s > it->second.score) it->second = Option{e.tgt.text(), s};
  }
}

const MonotoneDecoder::Option *MonotoneDecoder::best_option(std::string_view source) const {
  auto it = best_.find(source);
  return it == best_.end() ? nullptr : &it->second;
}

Decoding MonotoneDecoder::decode(std::span<const std::string> sentence) const {
  const std::size_t n = sentence.size();
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, kNone);
  std::vector<std::size_t> back(n + 1, 0);
  std::vector<const Option *> choice(n + 1, nullptr);
  best[0] = 0.0;
  std::string span;
  for (std::size_t end = 1; end <= n; ++end) {
    std::size_t longest = std::min(config_.max_phrase_len, end);
    // Longest spans first; only strict improvements replace them.
    for (std::size_t len = longest; len >= 1; --len) {
      std::size_t begin = end - len;
      span.clear();
      for (std::size_t k = begin; k < end; ++k) {
        if (k > begin) span.push_back(' ');
        span.append(sentence[k]);
      }
      const Option *opt = best_option(span);
      double score;
      if (opt != nullptr) {
        score = best[begin] + opt->score;
      } else if (len == 1) {
        score = best[begin] + config_.unknown_word_penalty;
      } else {
        continue;
      }
      if (score > best[end]) {
        best[end] = score;
        back[end] = begin;
        choice[end] = opt;
      }
    }
  }

  Decoding out;
  out.score = best[n];
  for (std::size_t end = n; end > 0; end = back[end]) {
    Segment seg;
    seg.begin = back[end];
    seg.end = end;
    if (choice[end] != nullptr) {
      seg.target = choice[end]->target;
      seg.score = choice[end]->score;
    } else {
      seg.target = sentence[seg.begin];
      seg.score = config_.unknown_word_penalty;
      seg.passthrough = true;
    }
    out.segments.push_back(std::move(seg));
  }
  std::reverse(out.segments.begin(), out.segments.end());
  for (const Segment &seg : out.segments) {
    std::size_t start = 0;
    while (start <= seg.target.size()) {
      std::size_t sp = seg.target.find(' ', start);
      if (sp == std::string::npos) sp = seg.target.size();
      out.tokens.emplace_back(seg.target.substr(start, sp - start));
      start = sp + 1;
    }
  }
  return out;
}

std::vector<std::string> decode_monotone(std::span<const std::string> sentence,
                                         const PhraseTable &table, const DecodeConfig &config) {
  return MonotoneDecoder(table, config).decode(sentence).tokens;
}

}  // namespace pivotsmith
