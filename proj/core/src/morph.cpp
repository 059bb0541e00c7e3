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

#include "pivotsmith/morph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pivotsmith/phrase.hpp"
#include "pivotsmith/text.hpp"

namespace pivotsmith {

namespace {

constexpr std::array<std::string_view, kNumMorphFeatures> kFeatureNames = {"POS", "GEN", "NUM",
                                                                          "DET"};

constexpr std::string_view kDefaultRules =
    "# Arabic value -> Hebrew value\n"
    "GEN\tFeminine\tFeminine\n"
    "GEN\tFeminine\tBoth\n"
    "GEN\tMasculine\tMasculine\n"
    "GEN\tMasculine\tBoth\n"
    "NUM\tSingular\tSingular\n"
    "NUM\tSingular\tSingular-Plural\n"
    "NUM\tDual\tDual\n"
    "NUM\tDual\tDual-Plural\n"
    "NUM\tPlural\tPlural\n"
    "NUM\tPlural\tDual-Plural\n"
    "NUM\tPlural\tSingular-Plural\n"
    "DET\tNoDeterminer\tNoDeterminer\n"
    "DET\tDeterminer\tDeterminer\n";

std::size_t index(MorphFeature f) { return static_cast<std::size_t>(f); }

void check_value(std::string_view v, std::size_t line_no, std::string_view what) {
  try {
    validate_token(v);
  } catch (const std::invalid_argument &e) {
    throw FormatError(line_no, "bad " + std::string(what) + ": " + e.what());
  }
}

template <class Map>
std::string argmax(const Map &counts) {
  // std::map iterates ascending, so the first maximum is the smallest key.
  const std::string *best = nullptr;
  std::uint64_t best_count = 0;
  for (const auto &[value, count] : counts) {
    if (best == nullptr || count > best_count) {
      best = &value;
      best_count = count;
    }
  }
  return best == nullptr ? std::string() : *best;
}

}  // namespace

std::string_view feature_name(MorphFeature f) { return kFeatureNames[index(f)]; }

std::optional<MorphFeature> parse_feature(std::string_view name) {
  std::string lower = text::to_lower(name);
  if (lower == "pos") return MorphFeature::kPos;
  if (lower == "gen") return MorphFeature::kGen;
  if (lower == "num") return MorphFeature::kNum;
  if (lower == "det") return MorphFeature::kDet;
  return std::nullopt;
}

std::vector<MorphFeature> parse_feature_list(std::string_view list) {
  std::vector<MorphFeature> out;
  for (std::string_view item : text::split(list, ",")) {
    item = text::trim(item);
    std::optional<MorphFeature> f = parse_feature(item);
    if (!f) throw std::invalid_argument("unknown morphological feature '" + std::string(item) + "'");
    for (MorphFeature g : out) {
      if (g == *f) throw std::invalid_argument("feature listed twice: " + std::string(item));
    }
    out.push_back(*f);
  }
  if (out.empty()) throw std::invalid_argument("empty feature list");
  return out;
}

std::vector<MorphFeature> default_features() {
  return {MorphFeature::kGen, MorphFeature::kNum, MorphFeature::kDet, MorphFeature::kPos};
}

std::string render_fc_tag(const MorphValues &values, const FcTagStyle &style) {
  std::string tag = "[";
  bool first = true;
  auto add = [&](MorphFeature f) {
    const std::string &v = values[index(f)];
    if (v == kAbsentValue) return;
    if (!first) tag.push_back('+');
    first = false;
    tag.append(v);
  };
  if (style.include_pos) add(MorphFeature::kPos);
  add(MorphFeature::kGen);
  add(MorphFeature::kNum);
  add(MorphFeature::kDet);
  tag.push_back(']');
  return tag;
}

const LexiconEntry *MorphLexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string_view MorphLexicon::fc_tag(std::string_view word) const {
  const LexiconEntry *e = find(word);
  return e == nullptr ? kUnknownFcTag : std::string_view(e->fc_tag);
}

void MorphLexicon::insert(std::string word, LexiconEntry entry) {
  entries_[std::move(word)] = std::move(entry);
}

void LexiconBuilder::add(std::string_view word, const MorphValues &values) {
  auto it = counts_.find(word);
  if (it == counts_.end()) it = counts_.emplace(std::string(word), WordCounts{}).first;
  WordCounts &c = it->second;
  for (std::size_t f = 0; f < kNumMorphFeatures; ++f) ++c.values[f][values[f]];
  ++c.combos[render_fc_tag(values, style_)];
  ++c.total;
}

void LexiconBuilder::add_tagged_corpus(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (text::trim(row).empty()) continue;
    std::vector<std::string_view> fields = text::split(row, "\t");
    if (fields.size() != 5) {
      throw FormatError(line_no, "malformed row: expected 5 tab-separated fields, found " +
                                     std::to_string(fields.size()));
    }
    check_value(fields[0], line_no, "token");
    MorphValues v;
    for (std::size_t f = 0; f < kNumMorphFeatures; ++f) {
      check_value(fields[f + 1], line_no, std::string(kFeatureNames[f]) + " value");
      v[f] = std::string(fields[f + 1]);
    }
    add(fields[0], v);
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading tagged corpus");
}

void LexiconBuilder::merge(const LexiconBuilder &other) {
  for (const auto &[word, oc] : other.counts_) {
    WordCounts &c = counts_[word];
    for (std::size_t f = 0; f < kNumMorphFeatures; ++f) {
      for (const auto &[v, n] : oc.values[f]) c.values[f][v] += n;
    }
    for (const auto &[tag, n] : oc.combos) c.combos[tag] += n;
    c.total += oc.total;
  }
}

MorphLexicon LexiconBuilder::build() const {
  MorphLexicon lex;
  for (const auto &[word, c] : counts_) {
    LexiconEntry e;
    for (std::size_t f = 0; f < kNumMorphFeatures; ++f) e.mle[f] = argmax(c.values[f]);
    e.fc_tag = argmax(c.combos);
    e.count = c.total;
    lex.insert(word, std::move(e));
  }
  return lex;
}

MorphLexicon build_lexicon(std::istream &tagged_corpus, FcTagStyle style) {
  LexiconBuilder b(style);
  b.add_tagged_corpus(tagged_corpus);
  return b.build();
}

MorphLexicon parse_lexicon(std::istream &in) {
  MorphLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.empty()) continue;
    std::vector<std::string_view> fields = text::split(row, "\t");
    if (fields.size() != 7) {
      throw FormatError(line_no, "malformed lexicon row: expected 7 fields, found " +
                                     std::to_string(fields.size()));
    }
    check_value(fields[0], line_no, "word");
    LexiconEntry e;
    for (std::size_t f = 0; f < kNumMorphFeatures; ++f) {
      check_value(fields[f + 1], line_no, "feature value");
      e.mle[f] = std::string(fields[f + 1]);
    }
    if (fields[5].size() < 2 || fields[5].front() != '[' || fields[5].back() != ']') {
      throw FormatError(line_no, "malformed FC tag '" + std::string(fields[5]) + "'");
    }
    e.fc_tag = std::string(fields[5]);
    unsigned long long n = 0;
    if (!text::parse_uint(fields[6], n)) throw FormatError(line_no, "malformed count");
    e.count = n;
    if (lex.find(fields[0]) != nullptr) {
      throw FormatError(line_no, "duplicate lexicon word '" + std::string(fields[0]) + "'");
    }
    lex.insert(std::string(fields[0]), std::move(e));
  }
  return lex;
}

void write_lexicon(const MorphLexicon &lexicon, std::ostream &out) {
  for (const auto &[word, e] : lexicon.entries()) {
    out << word;
    for (const std::string &v : e.mle) out << '\t' << v;
    out << '\t' << e.fc_tag << '\t' << e.count << '\n';
  }
  if (!out) throw std::runtime_error("I/O error while writing lexicon");
}

MorphLexicon read_lexicon_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_lexicon(in);
}

void RuleMapping::add(MorphFeature f, std::string src_value, std::string tgt_value) {
  pairs_[index(f)][std::move(src_value)].insert(std::move(tgt_value));
}

bool RuleMapping::allows(MorphFeature f, std::string_view src_value,
                         std::string_view tgt_value) const {
  const auto &m = pairs_[index(f)];
  auto it = m.find(src_value);
  return it != m.end() && it->second.find(tgt_value) != it->second.end();
}

RuleMapping RuleMapping::swapped() const {
  RuleMapping out;
  for (std::size_t f = 0; f < kNumMorphFeatures; ++f) {
    for (const auto &[src, tgts] : pairs_[f]) {
      for (const std::string &tgt : tgts) out.add(static_cast<MorphFeature>(f), tgt, src);
    }
  }
  return out;
}

std::size_t RuleMapping::size() const {
  std::size_t n = 0;
  for (const auto &m : pairs_) {
    for (const auto &[src, tgts] : m) n += tgts.size();
  }
  return n;
}

std::vector<std::pair<std::string, std::string>> RuleMapping::pairs(MorphFeature f) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &[src, tgts] : pairs_[index(f)]) {
    for (const std::string &tgt : tgts) out.emplace_back(src, tgt);
  }
  return out;
}

RuleMapping load_rules(std::istream &in) {
  RuleMapping rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (text::trim(row).empty() || row.front() == '#') continue;
    std::vector<std::string_view> fields = text::split(row, "\t");
    if (fields.size() != 3) {
      throw FormatError(line_no, "malformed rule: expected FEATURE<TAB>SRC<TAB>TGT");
    }
    std::optional<MorphFeature> f = parse_feature(fields[0]);
    if (!f) throw FormatError(line_no, "unknown feature '" + std::string(fields[0]) + "'");
    check_value(fields[1], line_no, "source value");
    check_value(fields[2], line_no, "target value");
    rules.add(*f, std::string(fields[1]), std::string(fields[2]));
  }
  return rules;
}

RuleMapping read_rules_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_rules(in);
}

void write_rules(const RuleMapping &rules, std::ostream &out) {
  for (std::size_t f = 0; f < kNumMorphFeatures; ++f) {
    for (const auto &[src, tgt] : rules.pairs(static_cast<MorphFeature>(f))) {
      out << kFeatureNames[f] << '\t' << src << '\t' << tgt << '\n';
    }
  }
}

std::string_view default_rules_tsv() { return kDefaultRules; }

const RuleMapping &default_rules() {
  static const RuleMapping rules = [] {
    std::istringstream in{std::string(kDefaultRules)};
    return load_rules(in);
  }();
  return rules;
}

void FcModel::set(const std::string &src_fc, const std::string &tgt_fc, FcProbabilities p) {
  table_[src_fc][tgt_fc] = p;
}

FcProbabilities FcModel::lookup(std::string_view src_fc, std::string_view tgt_fc) const {
  auto it = table_.find(src_fc);
  if (it == table_.end()) return {};
  auto jt = it->second.find(tgt_fc);
  return jt == it->second.end() ? FcProbabilities{} : jt->second;
}

std::size_t FcModel::size() const {
  std::size_t n = 0;
  for (const auto &[src, row] : table_) n += row.size();
  return n;
}

FcModel parse_fc_model(std::istream &in) {
  FcModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (text::trim(row).empty() || row.front() == '#') continue;
    std::vector<std::string_view> fields = text::split(row, "\t");
    if (fields.size() != 4) {
      throw FormatError(line_no, "malformed FC model row: expected 4 tab-separated fields");
    }
    FcProbabilities p;
    if (!text::parse_double(fields[2], p.tgt_given_src) ||
        !text::parse_double(fields[3], p.src_given_tgt)) {
      throw FormatError(line_no, "malformed probability");
    }
    if (!(p.tgt_given_src >= 0.0 && p.tgt_given_src <= 1.0 && p.src_given_tgt >= 0.0 &&
          p.src_given_tgt <= 1.0)) {
      throw FormatError(line_no, "probability out of range");
    }
    std::string src(text::trim(fields[0])), tgt(text::trim(fields[1]));
    if (src.empty() || tgt.empty()) throw FormatError(line_no, "empty FC tag");
    if (model.entries().count(src) != 0 && model.entries().at(src).count(tgt) != 0) {
      throw FormatError(line_no, "duplicate FC pair");
    }
    model.set(src, tgt, p);
  }
  return model;
}

void write_fc_model(const FcModel &model, std::ostream &out) {
  std::string buf;
  for (const auto &[src, row] : model.entries()) {
    for (const auto &[tgt, p] : row) {
      buf.clear();
      buf.append(src);
      buf.push_back('\t');
      buf.append(tgt);
      buf.push_back('\t');
      text::append_double(buf, p.tgt_given_src);
      buf.push_back('\t');
      text::append_double(buf, p.src_given_tgt);
      buf.push_back('\n');
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("I/O error while writing FC model");
}

FcModel read_fc_model_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_fc_model(in);
}

void FcModelTrainer::add_sentence(std::span<const std::string_view> src,
                                  std::span<const std::string_view> tgt,
                                  std::span<const WordLink> links) {
  std::vector<std::vector<std::size_t>> src_to_tgt(src.size()), tgt_to_src(tgt.size());
  for (const WordLink &l : links) {
    if (l.src >= src.size() || l.tgt >= tgt.size()) {
      throw std::invalid_argument("alignment link " + std::to_string(l.src) + "-" +
                                  std::to_string(l.tgt) + " out of range");
    }
    src_to_tgt[l.src].push_back(l.tgt);
    tgt_to_src[l.tgt].push_back(l.src);
  }
  auto sequence = [](std::vector<std::size_t> &positions, std::span<const std::string_view> words,
                     const MorphLexicon &lex) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    std::string seq;
    for (std::size_t p : positions) {
      if (!seq.empty()) seq.push_back(' ');
      seq.append(lex.fc_tag(words[p]));
    }
    return seq;
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src_to_tgt[i].empty()) continue;
    ++forward_[std::string(src_lex_.fc_tag(src[i]))][sequence(src_to_tgt[i], tgt, tgt_lex_)];
  }
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    if (tgt_to_src[j].empty()) continue;
    ++backward_[std::string(tgt_lex_.fc_tag(tgt[j]))][sequence(tgt_to_src[j], src, src_lex_)];
  }
}

void FcModelTrainer::merge(const FcModelTrainer &other) {
  for (const auto &[a, row] : other.forward_) {
    for (const auto &[b, n] : row) forward_[a][b] += n;
  }
  for (const auto &[a, row] : other.backward_) {
    for (const auto &[b, n] : row) backward_[a][b] += n;
  }
}

FcModel FcModelTrainer::finish() const {
  FcModel model;
  for (const auto &[src_tag, row] : forward_) {
    std::uint64_t total = 0;
    for (const auto &[seq, n] : row) total += n;
    for (const auto &[seq, n] : row) {
      FcProbabilities p = model.lookup(src_tag, seq);
      p.tgt_given_src = static_cast<double>(n) / static_cast<double>(total);
      model.set(src_tag, seq, p);
    }
  }
  for (const auto &[tgt_tag, row] : backward_) {
    std::uint64_t total = 0;
    for (const auto &[seq, n] : row) total += n;
    for (const auto &[seq, n] : row) {
      FcProbabilities p = model.lookup(seq, tgt_tag);
      p.src_given_tgt = static_cast<double>(n) / static_cast<double>(total);
      model.set(seq, tgt_tag, p);
    }
  }
  return model;
}

std::vector<WordLink> parse_word_links(std::string_view line, std::size_t src_len,
                                       std::size_t tgt_len) {
  std::vector<WordLink> links;
  for (std::string_view item : text::split_ws(line)) {
    std::size_t dash = item.find('-');
    unsigned long long i = 0, j = 0;
    if (dash == std::string_view::npos || !text::parse_uint(item.substr(0, dash), i) ||
        !text::parse_uint(item.substr(dash + 1), j)) {
      throw std::invalid_argument("malformed alignment link '" + std::string(item) + "'");
    }
    if (i >= src_len || j >= tgt_len) {
      throw std::invalid_argument("alignment link '" + std::string(item) + "' out of range");
    }
    links.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  return links;
}

FcModel train_fc_model(std::istream &src_text, std::istream &tgt_text, std::istream &alignments,
                       const MorphLexicon &src_lexicon, const MorphLexicon &tgt_lexicon) {
  FcModelTrainer trainer(src_lexicon, tgt_lexicon);
  std::string s, t, a;
  std::size_t line_no = 0;
  while (true) {
    bool hs = static_cast<bool>(std::getline(src_text, s));
    bool ht = static_cast<bool>(std::getline(tgt_text, t));
    bool ha = static_cast<bool>(std::getline(alignments, a));
    if (!hs && !ht && !ha) break;
    ++line_no;
    if (!hs || !ht || !ha) {
      throw FormatError(line_no, "sentence/alignment count mismatch");
    }
    std::vector<std::string_view> src = text::split_ws(s);
    std::vector<std::string_view> tgt = text::split_ws(t);
    try {
      std::vector<WordLink> links = parse_word_links(a, src.size(), tgt.size());
      trainer.add_sentence(src, tgt, links);
    } catch (const std::invalid_argument &e) {
      throw FormatError(line_no, e.what());
    }
  }
  return trainer.finish();
}

}  // namespace pivotsmith
