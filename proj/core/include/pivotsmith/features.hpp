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
// Per-entry quality scores appended to phrase tables as extra columns.
// Every scorer yields a source-side and a target-side score (w_s, w_t).

#ifndef PIVOTSMITH_FEATURES_HPP_
#define PIVOTSMITH_FEATURES_HPP_

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pivotsmith/morph.hpp"
#include "pivotsmith/phrase_table.hpp"

namespace pivotsmith {

struct FeatureScores {
  double w_s = 0.0;
  double w_t = 0.0;

  friend bool operator==(const FeatureScores &, const FeatureScores &) = default;
};

// Fraction of source (target) words covered by at least one link.
FeatureScores connectivity_scores(const PhraseEntry &entry);

// w_s = 1/|F| sum_f sum_{(i,j)} 1/n [(MLE_f(s_i), MLE_f(t_j)) in M_f], w_t
// the same with 1/m. Words missing from a lexicon never match. Values can
// exceed 1 when words carry several links. Throws std::invalid_argument if
// `features` is empty.
FeatureScores rule_morph_scores(const PhraseEntry &entry, const MorphLexicon &src_lexicon,
                                const MorphLexicon &tgt_lexicon, const RuleMapping &rules,
                                std::span<const MorphFeature> features);

// w_s = 1/n sum_{(i,j)} P(FC(s_i) | FC(t_j)),
// w_t = 1/m sum_{(i,j)} P(FC(t_j) | FC(s_i)).
FeatureScores induced_morph_scores(const PhraseEntry &entry, const MorphLexicon &src_lexicon,
                                   const MorphLexicon &tgt_lexicon, const FcModel &model);

using EntryScorer = std::function<FeatureScores(const PhraseEntry &)>;

EntryScorer connectivity_scorer();
// The scorers keep references to their models.
EntryScorer rule_morph_scorer(const MorphLexicon &src_lexicon, const MorphLexicon &tgt_lexicon,
                              const RuleMapping &rules, std::vector<MorphFeature> features);
EntryScorer induced_morph_scorer(const MorphLexicon &src_lexicon,
                                 const MorphLexicon &tgt_lexicon, const FcModel &model);

// Appends two extra columns named `names` to every entry. Entries are scored
// on `threads` workers; output is independent of the thread count.
// Throws std::invalid_argument if a name is already in the manifest.
PhraseTable annotate_table(const PhraseTable &table, const EntryScorer &scorer,
                           const std::pair<std::string, std::string> &names,
                           unsigned threads = 1);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_FEATURES_HPP_
