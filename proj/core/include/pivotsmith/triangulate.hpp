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
// Phrase-table triangulation. A source->pivot table and a pivot->target
// table are joined on identical pivot phrases e and each core score of the
// induced (s, t) pair is the sum over shared pivots of the product of the
// matching scores:
//
//   phi(t|s)  = sum_e phi(t|e) phi(e|s)      p_w(t|s) = sum_e p_w(t|e) p_w(e|s)
//   phi(s|t)  = sum_e phi(s|e) phi(e|t)      p_w(s|t) = sum_e p_w(s|e) p_w(e|t)
//
// The join runs as an external sort-merge keyed on the pivot phrase, so the
// cross product of matching pairs is streamed through disk and never held in
// memory.

#ifndef PIVOTSMITH_TRIANGULATE_HPP_
#define PIVOTSMITH_TRIANGULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "pivotsmith/phrase_table.hpp"
#include "pivotsmith/reordering.hpp"
#include "pivotsmith/weights.hpp"

namespace pivotsmith {

struct PivotConfig {
  std::size_t top_n = 1000;
  LogLinearWeights weights_sp;
  LogLinearWeights weights_pt;
  std::size_t min_alignment_links = 0;
};

struct StreamOptions {
  std::filesystem::path tmpdir;  // empty: default_scratch_root()
  // Shared by the internal sorters.
  std::size_t memory_bytes = std::size_t{384} << 20;
  unsigned threads = 1;
};

struct PivotStats {
  std::uint64_t sp_entries = 0;
  std::uint64_t sp_kept = 0;
  std::uint64_t pt_entries = 0;
  std::uint64_t pt_kept = 0;
  std::uint64_t shared_pivots = 0;
  std::uint64_t partial_pairs = 0;  // (s, e, t) paths
  std::uint64_t output_entries = 0;
  std::uint64_t dropped_by_links = 0;
  // Sums above 1 (beyond rounding noise) are clamped to 1 and counted here;
  // this only happens when the inputs are not normalized conditionals.
  std::uint64_t scores_clamped = 0;
  bool sp_extras_dropped = false;
  bool pt_extras_dropped = false;
  std::size_t runs_spilled = 0;
};

using EntrySource = std::function<bool(PhraseEntry &)>;
using EntrySink = std::function<void(const PhraseEntry &)>;

// Keeps, per source phrase, the n entries with the highest log-linear score;
// equal scores keep the smaller target.
PhraseTable filter_top_n(const PhraseTable &table, const LogLinearWeights &weights,
                         std::size_t n);

// { (i,k) : exists j, (i,j) in sp and (j,k) in pt }, sorted.
Alignment project_alignment(const Alignment &sp, const Alignment &pt);

// Streaming composition. Sources may yield entries in any order; extras are
// dropped (see PivotStats). Output reaches `sink` sorted by (src, tgt).
// Throws FormatError on duplicate (src, tgt) pairs within an input.
PivotStats pivot_compose_stream(const EntrySource &sp, const Manifest &sp_manifest,
                                const EntrySource &pt, const Manifest &pt_manifest,
                                const PivotConfig &config, const StreamOptions &options,
                                const EntrySink &sink);

PhraseTable pivot_compose(const PhraseTable &sp, const PhraseTable &pt,
                          const PivotConfig &config, const StreamOptions &options = {},
                          PivotStats *stats = nullptr);

// sum over pivots e of |{s : (s,e) in sp}| * |{t : (e,t) in pt}|.
class PivotSizeEstimator {
 public:
  void add_source_pivot(std::string_view pivot);
  void add_pivot_target(std::string_view pivot);
  std::uint64_t total() const;

 private:
  std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts_;
};

std::uint64_t estimate_pivot_size(const PhraseTable &sp, const PhraseTable &pt);

// Orientation distributions for every pair of the composed table:
// p(o|s,t) = sum_e phi(e|s) p(o|e,t), each directional triple renormalized.
// A pivot path whose (e, t) pair is missing from `pt_reordering` contributes
// the uniform distribution. Only the pivot->target orientations enter the
// mixture; `sp_reordering` is accepted so callers pass both sides.
ReorderingTable pivot_reordering(const ReorderingTable &sp_reordering,
                                 const ReorderingTable &pt_reordering,
                                 const PhraseTable &sp, const PhraseTable &pt,
                                 const PivotConfig &config);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_TRIANGULATE_HPP_
