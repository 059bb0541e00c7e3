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
// Phrase tables in the text format
//
//   SRC ||| TGT ||| phi_fwd lex_fwd phi_bwd lex_bwd [extras...] ||| i-j i-j ...
//
// with an optional first line "#features: name1 name2 ..." naming the extra
// score columns. Core scores are probabilities: phi_fwd = phi(t|s),
// lex_fwd = p_w(t|s), phi_bwd = phi(s|t), lex_bwd = p_w(s|t).

#ifndef PIVOTSMITH_PHRASE_TABLE_HPP_
#define PIVOTSMITH_PHRASE_TABLE_HPP_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pivotsmith/phrase.hpp"

namespace pivotsmith {

inline constexpr std::string_view kFieldSeparator = " ||| ";
inline constexpr std::string_view kFeaturesHeader = "#features:";
// Extra columns with this prefix mark which input table an entry came from.
inline constexpr std::string_view kOriginPrefix = "origin_";

enum CoreScore : std::size_t { kPhiFwd = 0, kLexFwd = 1, kPhiBwd = 2, kLexBwd = 3 };
inline constexpr std::size_t kNumCoreScores = 4;
inline constexpr std::array<std::string_view, kNumCoreScores> kCoreScoreNames = {
    "phi_fwd", "lex_fwd", "phi_bwd", "lex_bwd"};

struct ScoreSet {
  std::array<double, kNumCoreScores> core{};
  std::vector<double> extras;

  double phi_fwd() const { return core[kPhiFwd]; }
  double lex_fwd() const { return core[kLexFwd]; }
  double phi_bwd() const { return core[kPhiBwd]; }
  double lex_bwd() const { return core[kLexBwd]; }

  friend bool operator==(const ScoreSet &, const ScoreSet &) = default;
};

struct PhraseEntry {
  Phrase src;
  Phrase tgt;
  ScoreSet scores;
  Alignment alignment;

  friend bool operator==(const PhraseEntry &, const PhraseEntry &) = default;
};

// Ordered names of the extra score columns; the four core columns are implicit.
class Manifest {
 public:
  Manifest() = default;
  // Throws std::invalid_argument on duplicate, core-colliding or malformed names.
  explicit Manifest(std::vector<std::string> extras);

  const std::vector<std::string> &extras() const { return extras_; }
  std::size_t num_extras() const { return extras_.size(); }
  // Core names followed by the extras.
  std::vector<std::string> all_names() const;
  std::optional<std::size_t> extra_index(std::string_view name) const;
  bool contains(std::string_view name) const;
  // Indices (into extras) of origin indicator columns.
  const std::vector<std::size_t> &origin_columns() const { return origin_columns_; }

  friend bool operator==(const Manifest &a, const Manifest &b) { return a.extras_ == b.extras_; }

 private:
  std::vector<std::string> extras_;
  std::vector<std::size_t> origin_columns_;
};

// Throws std::invalid_argument if the entry breaks a table invariant.
void validate_entry(const PhraseEntry &entry, const Manifest &manifest);

// Strict total order used by tables: (src, tgt), then origin block with
// the lower origin index first.
bool entry_less(const PhraseEntry &a, const PhraseEntry &b, const Manifest &manifest);

// Immutable, validated, sorted table.
class PhraseTable {
 public:
  PhraseTable() = default;
  // Validates every entry and sorts. Duplicate (src, tgt) pairs throw
  // std::invalid_argument unless their origin columns differ.
  PhraseTable(Manifest manifest, std::vector<PhraseEntry> entries);

  const Manifest &manifest() const { return manifest_; }
  std::span<const PhraseEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const PhraseEntry &operator[](std::size_t i) const { return entries_[i]; }

  // Contiguous runs of entries sharing a source phrase, in table order.
  std::vector<std::span<const PhraseEntry>> source_groups() const;
  std::size_t distinct_sources() const;

  // Same entries with every extra column removed.
  PhraseTable without_extras() const;

  friend bool operator==(const PhraseTable &, const PhraseTable &) = default;

 private:
  Manifest manifest_;
  std::vector<PhraseEntry> entries_;
};

struct ReadOptions {
  std::size_t max_phrase_length = kDefaultMaxPhraseLength;
};

// Parses one entry line (no trailing newline). Throws FormatError without a
// line number.
PhraseEntry parse_entry_line(std::string_view line, const Manifest &manifest,
                             const ReadOptions &options = {});
void append_entry_line(std::string &out, const PhraseEntry &entry);

// Pull parser over a table stream; entries come out in file order.
class PhraseTableReader {
 public:
  explicit PhraseTableReader(std::istream &in, ReadOptions options = {});

  const Manifest &manifest() const { return manifest_; }
  // False at end of input. Throws FormatError with the line number.
  bool next(PhraseEntry &entry);
  std::size_t line_number() const { return line_no_; }

 private:
  bool read_line();

  std::istream &in_;
  ReadOptions options_;
  Manifest manifest_;
  std::string line_;
  bool pending_ = false;
  std::size_t line_no_ = 0;
};

class PhraseTableWriter {
 public:
  // Writes the header immediately when the manifest has extras.
  PhraseTableWriter(std::ostream &out, const Manifest &manifest);
  void write(const PhraseEntry &entry);
  std::size_t written() const { return written_; }

 private:
  std::ostream &out_;
  std::string buf_;
  std::size_t written_ = 0;
};

PhraseTable parse_phrase_table(std::istream &in, const ReadOptions &options = {});
void write_phrase_table(const PhraseTable &table, std::ostream &out);

PhraseTable read_phrase_table_file(const std::string &path, const ReadOptions &options = {});
void write_phrase_table_file(const PhraseTable &table, const std::string &path);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_PHRASE_TABLE_HPP_
