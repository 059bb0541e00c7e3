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
// Morphological resources for agreement features: maximum-likelihood
// lexicons built from tagged text, hand-written feature value mappings, and
// a translation model between feature-combination (FC) tags estimated from
// word-aligned parallel text.

#ifndef PIVOTSMITH_MORPH_HPP_
#define PIVOTSMITH_MORPH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pivotsmith {

enum class MorphFeature : std::size_t { kPos = 0, kGen = 1, kNum = 2, kDet = 3 };
inline constexpr std::size_t kNumMorphFeatures = 4;

// "POS", "GEN", "NUM", "DET".
std::string_view feature_name(MorphFeature f);
// Case-insensitive.
std::optional<MorphFeature> parse_feature(std::string_view name);
// Comma-separated list, e.g. "gen,num,det,pos". Throws std::invalid_argument.
std::vector<MorphFeature> parse_feature_list(std::string_view list);
// Gen, Num, Det, Pos.
std::vector<MorphFeature> default_features();

// Indexed by MorphFeature.
using MorphValues = std::array<std::string, kNumMorphFeatures>;

inline constexpr std::string_view kUnknownFcTag = "[UNK]";
// A feature value that is left out of rendered FC tags.
inline constexpr std::string_view kAbsentValue = "-";

struct FcTagStyle {
  bool include_pos = false;
};

// "[Gen+Num+Det]", Pos first when included, absent values skipped.
std::string render_fc_tag(const MorphValues &values, const FcTagStyle &style = {});

struct LexiconEntry {
  MorphValues mle;     // per-feature argmax
  std::string fc_tag;  // argmax over whole feature combinations
  std::uint64_t count = 0;

  friend bool operator==(const LexiconEntry &, const LexiconEntry &) = default;
};

class MorphLexicon {
 public:
  const LexiconEntry *find(std::string_view word) const;
  // kUnknownFcTag for words not in the lexicon.
  std::string_view fc_tag(std::string_view word) const;
  void insert(std::string word, LexiconEntry entry);
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, LexiconEntry, std::less<>> &entries() const { return entries_; }

  friend bool operator==(const MorphLexicon &, const MorphLexicon &) = default;

 private:
  std::map<std::string, LexiconEntry, std::less<>> entries_;
};

// Count accumulator; argmaxes are taken in build(). Ties go to the
// lexicographically smallest value (or rendered tag).
class LexiconBuilder {
 public:
  explicit LexiconBuilder(FcTagStyle style = {}) : style_(style) {}

  void add(std::string_view word, const MorphValues &values);
  // TSV rows "token pos gen num det", blank lines between sentences.
  // Throws FormatError with the line number.
  void add_tagged_corpus(std::istream &in);
  // Count-wise addition.
  void merge(const LexiconBuilder &other);
  MorphLexicon build() const;

 private:
  struct WordCounts {
    std::array<std::map<std::string, std::uint64_t>, kNumMorphFeatures> values;
    std::map<std::string, std::uint64_t> combos;
    std::uint64_t total = 0;
  };

  FcTagStyle style_;
  std::map<std::string, WordCounts, std::less<>> counts_;
};

MorphLexicon build_lexicon(std::istream &tagged_corpus, FcTagStyle style = {});

// TSV "word pos gen num det fc_tag count".
MorphLexicon parse_lexicon(std::istream &in);
void write_lexicon(const MorphLexicon &lexicon, std::ostream &out);
MorphLexicon read_lexicon_file(const std::string &path);

// Allowed (source value, target value) pairs per feature.
class RuleMapping {
 public:
  void add(MorphFeature f, std::string src_value, std::string tgt_value);
  bool allows(MorphFeature f, std::string_view src_value, std::string_view tgt_value) const;
  // Same pairs with source and target exchanged.
  RuleMapping swapped() const;
  std::size_t size() const;
  // All pairs of one feature, sorted.
  std::vector<std::pair<std::string, std::string>> pairs(MorphFeature f) const;

 private:
  using Targets = std::set<std::string, std::less<>>;
  std::array<std::map<std::string, Targets, std::less<>>, kNumMorphFeatures> pairs_;
};

// TSV "FEATURE SRC_VALUE TGT_VALUE"; '#' lines and blank lines skipped.
// Throws FormatError on unknown features.
RuleMapping load_rules(std::istream &in);
RuleMapping read_rules_file(const std::string &path);
void write_rules(const RuleMapping &rules, std::ostream &out);

// Bundled Arabic->Hebrew value mapping (Gen, Num, Det); identical to
// core/data/he_ar_rules.tsv.
std::string_view default_rules_tsv();
const RuleMapping &default_rules();

struct FcProbabilities {
  double tgt_given_src = 0.0;
  double src_given_tgt = 0.0;

  friend bool operator==(const FcProbabilities &, const FcProbabilities &) = default;
};

// Conditional probabilities between FC tags (or space-separated tag
// sequences) in both directions. Absent pairs have probability 0.
class FcModel {
 public:
  void set(const std::string &src_fc, const std::string &tgt_fc, FcProbabilities p);
  FcProbabilities lookup(std::string_view src_fc, std::string_view tgt_fc) const;
  double p_tgt_given_src(std::string_view src_fc, std::string_view tgt_fc) const {
    return lookup(src_fc, tgt_fc).tgt_given_src;
  }
  double p_src_given_tgt(std::string_view src_fc, std::string_view tgt_fc) const {
    return lookup(src_fc, tgt_fc).src_given_tgt;
  }
  std::size_t size() const;
  // src -> tgt -> probabilities, both sorted.
  const std::map<std::string, std::map<std::string, FcProbabilities, std::less<>>, std::less<>> &
  entries() const {
    return table_;
  }

  friend bool operator==(const FcModel &, const FcModel &) = default;

 private:
  std::map<std::string, std::map<std::string, FcProbabilities, std::less<>>, std::less<>> table_;
};

// TSV "src_fc tgt_fc p_tgt_given_src p_src_given_tgt" (6 significant digits).
FcModel parse_fc_model(std::istream &in);
void write_fc_model(const FcModel &model, std::ostream &out);
FcModel read_fc_model_file(const std::string &path);

struct WordLink {
  std::size_t src = 0;
  std::size_t tgt = 0;
};

// Relative-frequency estimation of FC translation probabilities. Each source
// word contributes one event (its tag, the tags of its aligned target words
// in position order joined by spaces); the reverse direction mirrors this.
// Unaligned words contribute nothing.
class FcModelTrainer {
 public:
  FcModelTrainer(const MorphLexicon &src_lexicon, const MorphLexicon &tgt_lexicon)
      : src_lex_(src_lexicon), tgt_lex_(tgt_lexicon) {}

  // Throws std::invalid_argument on an out-of-range link.
  void add_sentence(std::span<const std::string_view> src, std::span<const std::string_view> tgt,
                    std::span<const WordLink> links);
  void merge(const FcModelTrainer &other);
  FcModel finish() const;

 private:
  using Counts = std::map<std::string, std::map<std::string, std::uint64_t>>;

  const MorphLexicon &src_lex_;
  const MorphLexicon &tgt_lex_;
  Counts forward_;   // src tag -> target tag sequence -> count
  Counts backward_;  // tgt tag -> source tag sequence -> count
};

// "i-j" pairs, 0-based, bounds-checked against the sentence lengths.
std::vector<WordLink> parse_word_links(std::string_view line, std::size_t src_len,
                                       std::size_t tgt_len);

// One sentence per line in each stream. Throws FormatError on count
// mismatches or bad links.
FcModel train_fc_model(std::istream &src_text, std::istream &tgt_text, std::istream &alignments,
                       const MorphLexicon &src_lexicon, const MorphLexicon &tgt_lexicon);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_MORPH_HPP_
