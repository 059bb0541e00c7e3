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

#include "pivotsmith/reordering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pivotsmith/phrase_table.hpp"
#include "pivotsmith/text.hpp"

namespace pivotsmith {

namespace {

void validate_probs(const std::array<double, kNumOrientations> &p) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("orientation probability out of range");
  }
  for (std::size_t dir = 0; dir < 2; ++dir) {
    double sum = p[3 * dir] + p[3 * dir + 1] + p[3 * dir + 2];
    if (std::abs(sum - 1.0) > kOrientationSumTolerance) {
      throw std::invalid_argument("orientation triple does not sum to 1");
    }
  }
}

bool less(const ReorderingEntry &a, const ReorderingEntry &b) {
  if (a.src != b.src) return a.src < b.src;
  return a.tgt < b.tgt;
}

}  // namespace

ReorderingTable::ReorderingTable(std::vector<ReorderingEntry> entries)
    : entries_(std::move(entries)) {
  for (const ReorderingEntry &e : entries_) validate_probs(e.probs);
  std::stable_sort(entries_.begin(), entries_.end(), less);
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i - 1].src == entries_[i].src && entries_[i - 1].tgt == entries_[i].tgt) {
      throw std::invalid_argument("duplicate reordering entry '" + entries_[i].src.text() +
                                  " ||| " + entries_[i].tgt.text() + "'");
    }
  }
}

const ReorderingEntry *ReorderingTable::find(const Phrase &src, const Phrase &tgt) const {
  ReorderingEntry probe{src, tgt, {}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, less);
  if (it != entries_.end() && it->src == src && it->tgt == tgt) return &*it;
  return nullptr;
}

ReorderingTable parse_reordering_table(std::istream &in, std::size_t max_phrase_length) {
  std::vector<ReorderingEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    std::vector<std::string_view> fields = text::split(view, kFieldSeparator);
    if (fields.size() != 3) throw FormatError(line_no, "malformed line: expected 3 fields");
    ReorderingEntry e;
    try {
      e.src = Phrase::parse(fields[0], max_phrase_length);
      e.tgt = Phrase::parse(fields[1], max_phrase_length);
    } catch (const std::invalid_argument &ex) {
      throw FormatError(line_no, std::string("malformed phrase: ") + ex.what());
    }
    std::vector<std::string_view> probs = text::split_ws(fields[2]);
    if (probs.size() != kNumOrientations) {
      throw FormatError(line_no, "expected 6 orientation probabilities, found " +
                                     std::to_string(probs.size()));
    }
    for (std::size_t k = 0; k < kNumOrientations; ++k) {
      if (!text::parse_double(probs[k], e.probs[k])) {
        throw FormatError(line_no, "malformed probability '" + std::string(probs[k]) + "'");
      }
    }
    try {
      validate_probs(e.probs);
    } catch (const std::invalid_argument &ex) {
      throw FormatError(line_no, ex.what());
    }
    entries.push_back(std::move(e));
  }
  try {
    return ReorderingTable(std::move(entries));
  } catch (const std::invalid_argument &ex) {
    throw FormatError(ex.what());
  }
}

void write_reordering_table(const ReorderingTable &table, std::ostream &out) {
  std::string buf;
  for (const ReorderingEntry &e : table) {
    buf.clear();
    buf.append(e.src.text());
    buf.append(kFieldSeparator);
    buf.append(e.tgt.text());
    buf.append(kFieldSeparator);
    for (std::size_t k = 0; k < kNumOrientations; ++k) {
      if (k > 0) buf.push_back(' ');
      text::append_double(buf, e.probs[k], 8);
    }
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw std::runtime_error("I/O error while writing reordering table");
}

ReorderingTable read_reordering_file(const std::string &path, std::size_t max_phrase_length) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_reordering_table(in, max_phrase_length);
}

}  // namespace pivotsmith
