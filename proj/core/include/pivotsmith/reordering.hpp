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
// Lexicalized reordering tables: "SRC ||| TGT ||| p1 p2 p3 p4 p5 p6" where
// p1..p3 are monotone/swap/discontinuous left-to-right and p4..p6 the same
// orientations right-to-left.

#ifndef PIVOTSMITH_REORDERING_HPP_
#define PIVOTSMITH_REORDERING_HPP_

#include <array>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pivotsmith/phrase.hpp"

namespace pivotsmith {

inline constexpr std::size_t kNumOrientations = 6;
inline constexpr double kOrientationSumTolerance = 1e-6;

struct ReorderingEntry {
  Phrase src;
  Phrase tgt;
  std::array<double, kNumOrientations> probs{};

  friend bool operator==(const ReorderingEntry &, const ReorderingEntry &) = default;
};

class ReorderingTable {
 public:
  ReorderingTable() = default;
  // Validates probabilities and sorts by (src, tgt); duplicates throw.
  explicit ReorderingTable(std::vector<ReorderingEntry> entries);

  std::span<const ReorderingEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const ReorderingEntry *find(const Phrase &src, const Phrase &tgt) const;

 private:
  std::vector<ReorderingEntry> entries_;
};

ReorderingTable parse_reordering_table(std::istream &in,
                                       std::size_t max_phrase_length = kDefaultMaxPhraseLength);
// Probabilities are written with 8 significant digits.
void write_reordering_table(const ReorderingTable &table, std::ostream &out);

ReorderingTable read_reordering_file(const std::string &path,
                                     std::size_t max_phrase_length = kDefaultMaxPhraseLength);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_REORDERING_HPP_
