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

#include "pivotsmith/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string_view>

namespace pivotsmith {

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(const Sentence &s, std::size_t n) {
  NgramCounts counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    std::vector<std::string_view> key(s.begin() + static_cast<std::ptrdiff_t>(i),
                                      s.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(key)];
  }
  return counts;
}

}  // namespace

BleuStats &BleuStats::operator+=(const BleuStats &other) {
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

BleuStats sentence_stats(const Sentence &hyp, std::span<const Sentence> refs) {
  if (refs.empty()) throw std::invalid_argument("hypothesis has no references");
  BleuStats st;
  st.hyp_length = hyp.size();
  std::size_t best = refs.front().size();
  for (const Sentence &r : refs) {
    auto d = [&](std::size_t len) { return len > hyp.size() ? len - hyp.size() : hyp.size() - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  st.ref_length = best;

  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    NgramCounts h = count_ngrams(hyp, n);
    NgramCounts max_ref;
    for (const Sentence &r : refs) {
      for (auto &[gram, c] : count_ngrams(r, n)) {
        std::size_t &m = max_ref[gram];
        m = std::max(m, c);
      }
    }
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto &[gram, c] : h) {
      total += c;
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    st.matches[n - 1] = matched;
    st.totals[n - 1] = total;
  }
  return st;
}

BleuResult bleu_from_stats(const BleuStats &stats) {
  BleuResult r;
  r.stats = stats;
  bool zero = false;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    double p = stats.totals[n] == 0 ? 0.0
                                    : static_cast<double>(stats.matches[n]) /
                                          static_cast<double>(stats.totals[n]);
    r.precisions[n] = p;
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  if (stats.hyp_length == 0) {
    r.brevity_penalty = 0.0;
  } else if (stats.hyp_length >= stats.ref_length) {
    r.brevity_penalty = 1.0;
  } else {
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(stats.ref_length) /
                                           static_cast<double>(stats.hyp_length));
  }
  r.bleu = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / static_cast<double>(kBleuOrder));
  return r;
}

BleuResult corpus_bleu(std::span<const Sentence> hyps, std::span<const std::vector<Sentence>> refs) {
  if (hyps.empty()) throw std::invalid_argument("empty corpus");
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument("hypothesis count " + std::to_string(hyps.size()) +
                                " does not match reference count " + std::to_string(refs.size()));
  }
  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += sentence_stats(hyps[i], refs[i]);
  return bleu_from_stats(total);
}

double bleu4(std::span<const Sentence> hyps, std::span<const std::vector<Sentence>> refs) {
  return corpus_bleu(hyps, refs).bleu;
}

}  // namespace pivotsmith
