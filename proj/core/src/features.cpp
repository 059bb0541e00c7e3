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

#include "pivotsmith/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "pivotsmith/parallel.hpp"

namespace pivotsmith {

FeatureScores connectivity_scores(const PhraseEntry &entry) {
  std::vector<bool> src_hit(entry.src.size()), tgt_hit(entry.tgt.size());
  for (const AlignmentLink &l : entry.alignment) {
    src_hit[l.src] = true;
    tgt_hit[l.tgt] = true;
  }
  auto covered = [](const std::vector<bool> &v) {
    return static_cast<double>(std::count(v.begin(), v.end(), true));
  };
  return {covered(src_hit) / static_cast<double>(entry.src.size()),
          covered(tgt_hit) / static_cast<double>(entry.tgt.size())};
}

FeatureScores rule_morph_scores(const PhraseEntry &entry, const MorphLexicon &src_lexicon,
                                const MorphLexicon &tgt_lexicon, const RuleMapping &rules,
                                std::span<const MorphFeature> features) {
  if (features.empty()) throw std::invalid_argument("feature set must not be empty");
  std::vector<std::string_view> src = entry.src.tokens();
  std::vector<std::string_view> tgt = entry.tgt.tokens();
  std::size_t matches = 0;
  for (const AlignmentLink &l : entry.alignment) {
    const LexiconEntry *s = src_lexicon.find(src[l.src]);
    const LexiconEntry *t = tgt_lexicon.find(tgt[l.tgt]);
    if (s == nullptr || t == nullptr) continue;
    for (MorphFeature f : features) {
      std::size_t k = static_cast<std::size_t>(f);
      if (rules.allows(f, s->mle[k], t->mle[k])) ++matches;
    }
  }
  double total = static_cast<double>(matches) / static_cast<double>(features.size());
  return {total / static_cast<double>(src.size()), total / static_cast<double>(tgt.size())};
}

FeatureScores induced_morph_scores(const PhraseEntry &entry, const MorphLexicon &src_lexicon,
                                   const MorphLexicon &tgt_lexicon, const FcModel &model) {
  std::vector<std::string_view> src = entry.src.tokens();
  std::vector<std::string_view> tgt = entry.tgt.tokens();
  double sum_s = 0.0, sum_t = 0.0;
  for (const AlignmentLink &l : entry.alignment) {
    FcProbabilities p =
        model.lookup(src_lexicon.fc_tag(src[l.src]), tgt_lexicon.fc_tag(tgt[l.tgt]));
    sum_s += p.src_given_tgt;
    sum_t += p.tgt_given_src;
  }
  return {sum_s / static_cast<double>(src.size()), sum_t / static_cast<double>(tgt.size())};
}

EntryScorer connectivity_scorer() { return connectivity_scores; }

EntryScorer rule_morph_scorer(const MorphLexicon &src_lexicon, const MorphLexicon &tgt_lexicon,
                              const RuleMapping &rules, std::vector<MorphFeature> features) {
  if (features.empty()) throw std::invalid_argument("feature set must not be empty");
  return [&src_lexicon, &tgt_lexicon, &rules, features = std::move(features)](
             const PhraseEntry &e) {
    return rule_morph_scores(e, src_lexicon, tgt_lexicon, rules, features);
  };
}

EntryScorer induced_morph_scorer(const MorphLexicon &src_lexicon,
                                 const MorphLexicon &tgt_lexicon, const FcModel &model) {
  return [&src_lexicon, &tgt_lexicon, &model](const PhraseEntry &e) {
    return induced_morph_scores(e, src_lexicon, tgt_lexicon, model);
  };
}

PhraseTable annotate_table(const PhraseTable &table, const EntryScorer &scorer,
                           const std::pair<std::string, std::string> &names,
                           unsigned threads) {
  const Manifest &old = table.manifest();
  if (old.contains(names.first) || old.contains(names.second) || names.first == names.second) {
    throw std::invalid_argument("feature name collision: '" + names.first + "', '" +
                                names.second + "'");
  }
  std::vector<std::string> extras = old.extras();
  extras.push_back(names.first);
  extras.push_back(names.second);
  Manifest manifest(std::move(extras));

  std::vector<PhraseEntry> out(table.begin(), table.end());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      FeatureScores s = scorer(out[i]);
      out[i].scores.extras.push_back(s.w_s);
      out[i].scores.extras.push_back(s.w_t);
    }
  };
  parallel_for(out.size(), threads, work);
  return PhraseTable(std::move(manifest), std::move(out));
}

}  // namespace pivotsmith
