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

#include "pivotsmith/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pivotsmith/external_sort.hpp"
#include "pivotsmith/text.hpp"

namespace pivotsmith {

namespace {

constexpr char kKeySep = '\0';
// Rounding slack for sums of products of normalized probabilities.
constexpr double kSumSlack = 1e-9;

// Indices of the entries kept by top-n selection, in ascending order.
// `scores[k]` belongs to the k-th candidate; candidates arrive in ascending
// target order, so a stable sort on score alone breaks ties by target.
std::vector<std::size_t> select_top_n(const std::vector<double> &scores, std::size_t n) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n >= idx.size()) return idx;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Core scores and alignment of one side of a join, serialized as
// 4 doubles | u16 link count | (u8 src, u8 tgt)*.
struct Item {
  std::string other;
  std::array<double, kNumCoreScores> core{};
  Alignment links;
};

void encode_payload(std::string &out, const std::array<double, kNumCoreScores> &core,
                    const Alignment &links) {
  out.clear();
  out.append(reinterpret_cast<const char *>(core.data()), sizeof(double) * kNumCoreScores);
  std::uint16_t n = static_cast<std::uint16_t>(links.size());
  out.append(reinterpret_cast<const char *>(&n), sizeof n);
  for (const AlignmentLink &l : links) {
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(l.src)));
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(l.tgt)));
  }
}

void decode_payload(std::string_view p, std::array<double, kNumCoreScores> &core,
                    Alignment &links) {
  constexpr std::size_t kScores = sizeof(double) * kNumCoreScores;
  if (p.size() < kScores + 2) throw std::runtime_error("corrupt sort record");
  std::memcpy(core.data(), p.data(), kScores);
  std::uint16_t n = 0;
  std::memcpy(&n, p.data() + kScores, sizeof n);
  if (p.size() != kScores + 2 + 2 * std::size_t{n}) throw std::runtime_error("corrupt sort record");
  links.resize(n);
  const auto *b = reinterpret_cast<const unsigned char *>(p.data() + kScores + 2);
  for (std::size_t k = 0; k < n; ++k) links[k] = {b[2 * k], b[2 * k + 1]};
}

void make_key(std::string &out, std::string_view a, std::string_view b) {
  out.assign(a);
  out.push_back(kKeySep);
  out.append(b);
}

// Groups records keyed "group\0other" by group.
class GroupReader {
 public:
  explicit GroupReader(SortedRecords &records, bool reject_duplicates)
      : records_(records), reject_duplicates_(reject_duplicates) {
    pending_ = records_.next();
  }

  bool next(std::string &group, std::vector<Item> &items) {
    items.clear();
    if (!pending_) return false;
    std::string_view key = records_.key();
    std::size_t sep = key.find(kKeySep);
    group.assign(key.substr(0, sep));
    while (pending_) {
      key = records_.key();
      sep = key.find(kKeySep);
      if (key.substr(0, sep) != group) break;
      std::string_view other = key.substr(sep + 1);
      if (reject_duplicates_ && !items.empty() && items.back().other == other) {
        throw FormatError("duplicate entry '" + group + " ||| " + std::string(other) + "'");
      }
      Item &it = items.emplace_back();
      it.other.assign(other);
      decode_payload(records_.payload(), it.core, it.links);
      pending_ = records_.next();
    }
    return true;
  }

 private:
  SortedRecords &records_;
  bool reject_duplicates_;
  bool pending_ = false;
};

double group_score(const Item &it, std::span<const double> w) {
  double total = 0.0;
  for (std::size_t k = 0; k < kNumCoreScores; ++k) {
    total += w[k] * std::log(std::max(it.core[k], kProbabilityFloor));
  }
  return total;
}

// Applies top-n to a group in place; items stay in ascending `other` order.
void keep_top_n(std::vector<Item> &items, std::span<const double> weights, std::size_t n) {
  if (items.size() <= n) return;
  std::vector<double> scores;
  scores.reserve(items.size());
  for (const Item &it : items) scores.push_back(group_score(it, weights));
  std::vector<std::size_t> keep = select_top_n(scores, n);
  std::vector<Item> kept;
  kept.reserve(keep.size());
  for (std::size_t k : keep) kept.push_back(std::move(items[k]));
  items = std::move(kept);
}

SortOptions sorter_options(const StreamOptions &o, std::size_t share) {
  SortOptions s;
  s.tmpdir = o.tmpdir;
  s.memory_bytes = std::max<std::size_t>(o.memory_bytes / share, std::size_t{1} << 16);
  s.threads = std::max(1u, o.threads);
  return s;
}

// Feeds a source into a sorter keyed "src\0tgt".
std::uint64_t load_sorted(const EntrySource &source, ExternalSorter &sorter) {
  PhraseEntry e;
  std::string key, payload;
  std::uint64_t n = 0;
  while (source(e)) {
    if (e.src.size() > kMaxPhraseLengthLimit || e.tgt.size() > kMaxPhraseLengthLimit) {
      throw FormatError("phrase too long for composition");
    }
    make_key(key, e.src.text(), e.tgt.text());
    encode_payload(payload, e.scores.core, e.alignment);
    sorter.add(key, payload);
    ++n;
  }
  return n;
}

double finish_sum(double v, std::uint64_t &clamped) {
  if (v <= 1.0) return v;
  if (v > 1.0 + kSumSlack) ++clamped;
  return 1.0;
}

}  // namespace

PhraseTable filter_top_n(const PhraseTable &table, const LogLinearWeights &weights,
                         std::size_t n) {
  if (n == 0) throw std::invalid_argument("top-n must be positive");
  std::vector<double> w = weights.resolve(table.manifest());
  std::vector<PhraseEntry> kept;
  for (std::span<const PhraseEntry> group : table.source_groups()) {
    std::vector<double> scores;
    scores.reserve(group.size());
    for (const PhraseEntry &e : group) scores.push_back(loglinear_score(e.scores, w));
    for (std::size_t k : select_top_n(scores, n)) kept.push_back(group[k]);
  }
  return PhraseTable(table.manifest(), std::move(kept));
}

Alignment project_alignment(const Alignment &sp, const Alignment &pt) {
  Alignment out;
  for (const AlignmentLink &a : sp) {
    auto lo = std::lower_bound(pt.begin(), pt.end(), AlignmentLink{a.tgt, 0});
    for (auto it = lo; it != pt.end() && it->src == a.tgt; ++it) {
      out.push_back({a.src, it->tgt});
    }
  }
  normalize_alignment(out);
  return out;
}

PivotStats pivot_compose_stream(const EntrySource &sp, const Manifest &sp_manifest,
                                const EntrySource &pt, const Manifest &pt_manifest,
                                const PivotConfig &config, const StreamOptions &options,
                                const EntrySink &sink) {
  if (config.top_n == 0) throw std::invalid_argument("top-n must be positive");
  PivotStats stats;
  stats.sp_extras_dropped = sp_manifest.num_extras() > 0;
  stats.pt_extras_dropped = pt_manifest.num_extras() > 0;
  const std::vector<double> w_sp = config.weights_sp.resolve(Manifest{});
  const std::vector<double> w_pt = config.weights_pt.resolve(Manifest{});

  std::string key, payload, group;
  std::vector<Item> items;

  // Source->pivot: top-n per source, then re-keyed by pivot.
  ExternalSorter by_pivot(sorter_options(options, 3));
  {
    ExternalSorter by_source(sorter_options(options, 3));
    stats.sp_entries = load_sorted(sp, by_source);
    SortedRecords records = by_source.finish();
    GroupReader groups(records, true);
    while (groups.next(group, items)) {
      keep_top_n(items, w_sp, config.top_n);
      for (const Item &it : items) {
        make_key(key, it.other, group);
        encode_payload(payload, it.core, it.links);
        by_pivot.add(key, payload);
        ++stats.sp_kept;
      }
    }
    stats.runs_spilled += by_source.runs_spilled();
  }
  SortedRecords sp_by_pivot = by_pivot.finish();
  stats.runs_spilled += by_pivot.runs_spilled();

  // Pivot->target is already keyed by pivot; top-n is applied per group
  // while joining.
  ExternalSorter pt_sorter(sorter_options(options, 3));
  stats.pt_entries = load_sorted(pt, pt_sorter);
  SortedRecords pt_by_pivot = pt_sorter.finish();
  stats.runs_spilled += pt_sorter.runs_spilled();

  // Join pivot by pivot; every (s, e, t) path becomes a record keyed
  // "s\0t\0e" so paths of one output pair are adjacent and summed in a
  // fixed pivot order.
  ExternalSorter paths(sorter_options(options, 3));
  {
    GroupReader left(sp_by_pivot, false);
    GroupReader right(pt_by_pivot, true);
    std::string lkey, rkey;
    std::vector<Item> litems, ritems;
    bool lok = left.next(lkey, litems);
    bool rok = right.next(rkey, ritems);
    if (rok) {
      stats.pt_kept += std::min(ritems.size(), config.top_n);
      keep_top_n(ritems, w_pt, config.top_n);
    }
    std::array<double, kNumCoreScores> prod{};
    while (lok && rok) {
      int c = lkey.compare(rkey);
      if (c < 0) {
        lok = left.next(lkey, litems);
        continue;
      }
      if (c > 0) {
        rok = right.next(rkey, ritems);
        if (rok) {
          stats.pt_kept += std::min(ritems.size(), config.top_n);
          keep_top_n(ritems, w_pt, config.top_n);
        }
        continue;
      }
      ++stats.shared_pivots;
      for (const Item &s : litems) {
        for (const Item &t : ritems) {
          for (std::size_t k = 0; k < kNumCoreScores; ++k) prod[k] = s.core[k] * t.core[k];
          encode_payload(payload, prod, project_alignment(s.links, t.links));
          key.assign(s.other);
          key.push_back(kKeySep);
          key.append(t.other);
          key.push_back(kKeySep);
          key.append(lkey);
          paths.add(key, payload);
          ++stats.partial_pairs;
        }
      }
      lok = left.next(lkey, litems);
      rok = right.next(rkey, ritems);
      if (rok) {
        stats.pt_kept += std::min(ritems.size(), config.top_n);
        keep_top_n(ritems, w_pt, config.top_n);
      }
    }
    // Remaining pivot->target groups still count towards pt_kept.
    while (rok) {
      rok = right.next(rkey, ritems);
      if (rok) stats.pt_kept += std::min(ritems.size(), config.top_n);
    }
  }
  sp_by_pivot = SortedRecords();
  pt_by_pivot = SortedRecords();
  SortedRecords path_records = paths.finish();
  stats.runs_spilled += paths.runs_spilled();

  // Aggregate adjacent paths of the same (s, t).
  PhraseEntry out;
  std::array<double, kNumCoreScores> core{};
  Alignment links, merged;
  std::string pair_key;
  bool have = false;
  auto flush = [&] {
    for (std::size_t k = 0; k < kNumCoreScores; ++k) {
      out.scores.core[k] = finish_sum(out.scores.core[k], stats.scores_clamped);
    }
    normalize_alignment(merged);
    if (merged.size() < config.min_alignment_links) {
      ++stats.dropped_by_links;
      return;
    }
    std::size_t sep = pair_key.find(kKeySep);
    out.src = Phrase::from_canonical(pair_key.substr(0, sep));
    out.tgt = Phrase::from_canonical(pair_key.substr(sep + 1));
    out.alignment = merged;
    sink(out);
    ++stats.output_entries;
  };
  while (path_records.next()) {
    std::string_view k = path_records.key();
    std::size_t last = k.rfind(kKeySep);
    std::string_view pk = k.substr(0, last);
    decode_payload(path_records.payload(), core, links);
    if (!have || pk != pair_key) {
      if (have) flush();
      have = true;
      pair_key.assign(pk);
      out.scores.core = {0.0, 0.0, 0.0, 0.0};
      out.scores.extras.clear();
      merged.clear();
    }
    for (std::size_t i = 0; i < kNumCoreScores; ++i) out.scores.core[i] += core[i];
    merged.insert(merged.end(), links.begin(), links.end());
  }
  if (have) flush();
  return stats;
}

PhraseTable pivot_compose(const PhraseTable &sp, const PhraseTable &pt,
                          const PivotConfig &config, const StreamOptions &options,
                          PivotStats *stats) {
  std::size_t i = 0, j = 0;
  EntrySource sp_src = [&](PhraseEntry &e) {
    if (i == sp.size()) return false;
    e = sp[i++];
    return true;
  };
  EntrySource pt_src = [&](PhraseEntry &e) {
    if (j == pt.size()) return false;
    e = pt[j++];
    return true;
  };
  std::vector<PhraseEntry> out;
  PivotStats s = pivot_compose_stream(sp_src, sp.manifest(), pt_src, pt.manifest(), config,
                                      options, [&](const PhraseEntry &e) { out.push_back(e); });
  if (stats != nullptr) *stats = s;
  return PhraseTable(Manifest{}, std::move(out));
}

void PivotSizeEstimator::add_source_pivot(std::string_view pivot) {
  ++counts_[std::string(pivot)].first;
}

void PivotSizeEstimator::add_pivot_target(std::string_view pivot) {
  ++counts_[std::string(pivot)].second;
}

std::uint64_t PivotSizeEstimator::total() const {
  std::uint64_t total = 0;
  for (const auto &[pivot, c] : counts_) total += c.first * c.second;
  return total;
}

std::uint64_t estimate_pivot_size(const PhraseTable &sp, const PhraseTable &pt) {
  PivotSizeEstimator est;
  for (const PhraseEntry &e : sp) est.add_source_pivot(e.tgt.text());
  for (const PhraseEntry &e : pt) est.add_pivot_target(e.src.text());
  return est.total();
}

ReorderingTable pivot_reordering(const ReorderingTable & /*sp_reordering*/,
                                 const ReorderingTable &pt_reordering,
                                 const PhraseTable &sp, const PhraseTable &pt,
                                 const PivotConfig &config) {
  const PhraseTable sp_f = filter_top_n(sp.without_extras(), config.weights_sp, config.top_n);
  const PhraseTable pt_f = filter_top_n(pt.without_extras(), config.weights_pt, config.top_n);
  const PhraseTable composed = pivot_compose(sp_f, pt_f, config);

  std::map<std::string, std::vector<const PhraseEntry *>, std::less<>> pt_by_pivot;
  for (const PhraseEntry &e : pt_f) pt_by_pivot[e.src.text()].push_back(&e);

  auto in_composed = [&](const Phrase &s, const Phrase &t) {
    PhraseEntry probe;
    probe.src = s;
    probe.tgt = t;
    auto it = std::lower_bound(composed.begin(), composed.end(), probe,
                               [](const PhraseEntry &a, const PhraseEntry &b) {
                                 if (a.src != b.src) return a.src < b.src;
                                 return a.tgt < b.tgt;
                               });
    return it != composed.end() && it->src == s && it->tgt == t;
  };

  constexpr double kThird = 1.0 / 3.0;
  std::map<std::pair<std::string, std::string>, std::array<double, kNumOrientations>> acc;
  // sp_f is sorted by (s, e), so each pair accumulates in ascending pivot order.
  for (const PhraseEntry &se : sp_f) {
    auto it = pt_by_pivot.find(se.tgt.text());
    if (it == pt_by_pivot.end()) continue;
    for (const PhraseEntry *et : it->second) {
      if (!in_composed(se.src, et->tgt)) continue;
      auto &probs = acc[{se.src.text(), et->tgt.text()}];
      const ReorderingEntry *r = pt_reordering.find(se.tgt, et->tgt);
      for (std::size_t k = 0; k < kNumOrientations; ++k) {
        probs[k] += se.scores.phi_fwd() * (r != nullptr ? r->probs[k] : kThird);
      }
    }
  }
  std::vector<ReorderingEntry> out;
  out.reserve(acc.size());
  for (auto &[pair, probs] : acc) {
    for (std::size_t dir = 0; dir < 2; ++dir) {
      double sum = probs[3 * dir] + probs[3 * dir + 1] + probs[3 * dir + 2];
      for (std::size_t k = 3 * dir; k < 3 * dir + 3; ++k) {
        probs[k] = sum > 0.0 ? probs[k] / sum : kThird;
      }
    }
    out.push_back({Phrase::from_canonical(pair.first), Phrase::from_canonical(pair.second),
                   probs});
  }
  return ReorderingTable(std::move(out));
}

}  // namespace pivotsmith
