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

#include "pivotsmith/phrase_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pivotsmith/text.hpp"

namespace pivotsmith {

Manifest::Manifest(std::vector<std::string> extras) : extras_(std::move(extras)) {
  for (std::size_t i = 0; i < extras_.size(); ++i) {
    const std::string &name = extras_[i];
    try {
      validate_token(name);
    } catch (const std::invalid_argument &e) {
      throw std::invalid_argument("bad feature name: " + std::string(e.what()));
    }
    if (std::find(kCoreScoreNames.begin(), kCoreScoreNames.end(), name) !=
        kCoreScoreNames.end()) {
      throw std::invalid_argument("extra feature '" + name + "' collides with a core score");
    }
    if (std::find(extras_.begin(), extras_.begin() + static_cast<std::ptrdiff_t>(i), name) !=
        extras_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw std::invalid_argument("duplicate feature name '" + name + "'");
    }
    if (name.starts_with(kOriginPrefix)) origin_columns_.push_back(i);
  }
}

std::vector<std::string> Manifest::all_names() const {
  std::vector<std::string> names(kCoreScoreNames.begin(), kCoreScoreNames.end());
  names.insert(names.end(), extras_.begin(), extras_.end());
  return names;
}

std::optional<std::size_t> Manifest::extra_index(std::string_view name) const {
  for (std::size_t i = 0; i < extras_.size(); ++i) {
    if (extras_[i] == name) return i;
  }
  return std::nullopt;
}

bool Manifest::contains(std::string_view name) const {
  return extra_index(name).has_value() ||
         std::find(kCoreScoreNames.begin(), kCoreScoreNames.end(), name) !=
             kCoreScoreNames.end();
}

void validate_entry(const PhraseEntry &e, const Manifest &manifest) {
  if (e.src.empty() || e.tgt.empty()) throw std::invalid_argument("empty phrase");
  for (double s : e.scores.core) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("score out of range");
  }
  if (e.scores.extras.size() != manifest.num_extras()) {
    throw std::invalid_argument("extras count mismatch: expected " +
                                std::to_string(manifest.num_extras()) + ", got " +
                                std::to_string(e.scores.extras.size()));
  }
  for (double s : e.scores.extras) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("extra score must be finite and non-negative");
    }
  }
  for (std::size_t k = 0; k < e.alignment.size(); ++k) {
    const AlignmentLink &l = e.alignment[k];
    if (l.src >= e.src.size() || l.tgt >= e.tgt.size()) {
      throw std::invalid_argument("alignment index out of range");
    }
    if (k > 0 && !(e.alignment[k - 1] < l)) {
      throw std::invalid_argument("alignment links not sorted or duplicated");
    }
  }
}

namespace {

// <0 when a's origin block sorts first; blocks compare descending so the
// entry flagged in the lowest origin column comes first.
int compare_origin(const PhraseEntry &a, const PhraseEntry &b, const Manifest &manifest) {
  for (std::size_t c : manifest.origin_columns()) {
    double x = a.scores.extras[c], y = b.scores.extras[c];
    if (x > y) return -1;
    if (x < y) return 1;
  }
  return 0;
}

}  // namespace

bool entry_less(const PhraseEntry &a, const PhraseEntry &b, const Manifest &manifest) {
  if (int c = a.src.text().compare(b.src.text()); c != 0) return c < 0;
  if (int c = a.tgt.text().compare(b.tgt.text()); c != 0) return c < 0;
  return compare_origin(a, b, manifest) < 0;
}

PhraseTable::PhraseTable(Manifest manifest, std::vector<PhraseEntry> entries)
    : manifest_(std::move(manifest)), entries_(std::move(entries)) {
  for (const PhraseEntry &e : entries_) validate_entry(e, manifest_);
  if (!std::is_sorted(entries_.begin(), entries_.end(),
                      [this](const PhraseEntry &a, const PhraseEntry &b) {
                        return entry_less(a, b, manifest_);
                      })) {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [this](const PhraseEntry &a, const PhraseEntry &b) {
                       return entry_less(a, b, manifest_);
                     });
  }
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    const PhraseEntry &a = entries_[i - 1];
    const PhraseEntry &b = entries_[i];
    if (a.src == b.src && a.tgt == b.tgt && compare_origin(a, b, manifest_) == 0) {
      throw std::invalid_argument("duplicate entry '" + a.src.text() + " ||| " +
                                  a.tgt.text() + "'");
    }
  }
}

std::vector<std::span<const PhraseEntry>> PhraseTable::source_groups() const {
  std::vector<std::span<const PhraseEntry>> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= entries_.size(); ++i) {
    if (i == entries_.size() || entries_[i].src != entries_[start].src) {
      groups.emplace_back(entries_.data() + start, i - start);
      start = i;
    }
  }
  return groups;
}

std::size_t PhraseTable::distinct_sources() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == 0 || entries_[i].src != entries_[i - 1].src) ++n;
  }
  return n;
}

PhraseTable PhraseTable::without_extras() const {
  std::vector<PhraseEntry> out(entries_.begin(), entries_.end());
  for (PhraseEntry &e : out) e.scores.extras.clear();
  return PhraseTable(Manifest{}, std::move(out));
}

PhraseEntry parse_entry_line(std::string_view line, const Manifest &manifest,
                             const ReadOptions &options) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields = text::split(line, kFieldSeparator);
  // An empty alignment leaves the line ending in " |||".
  if (fields.size() == 3 && fields[2].ends_with(" |||")) {
    fields[2].remove_suffix(4);
    fields.push_back(std::string_view{});
  }
  if (fields.size() != 4) {
    throw FormatError("malformed line: expected 4 fields separated by ' ||| ', found " +
                      std::to_string(fields.size()));
  }
  PhraseEntry e;
  try {
    e.src = Phrase::parse(fields[0], options.max_phrase_length);
    e.tgt = Phrase::parse(fields[1], options.max_phrase_length);
  } catch (const std::invalid_argument &ex) {
    throw FormatError(std::string("malformed phrase: ") + ex.what());
  }
  std::vector<std::string_view> scores = text::split_ws(fields[2]);
  if (scores.size() != kNumCoreScores + manifest.num_extras()) {
    if (scores.size() < kNumCoreScores) {
      throw FormatError("malformed line: expected 4 core scores, found " +
                        std::to_string(scores.size()));
    }
    throw FormatError("extras count mismatch: expected " +
                      std::to_string(manifest.num_extras()) + ", found " +
                      std::to_string(scores.size() - kNumCoreScores));
  }
  for (std::size_t k = 0; k < scores.size(); ++k) {
    double v = 0.0;
    if (!text::parse_double(scores[k], v)) {
      throw FormatError("malformed score '" + std::string(scores[k]) + "'");
    }
    if (k < kNumCoreScores) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw FormatError("score out of range: " + std::string(scores[k]));
      }
      e.scores.core[k] = v;
    } else {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw FormatError("extra score out of range: " + std::string(scores[k]));
      }
      e.scores.extras.push_back(v);
    }
  }
  try {
    e.alignment = parse_alignment(fields[3], e.src.size(), e.tgt.size());
  } catch (const std::invalid_argument &ex) {
    throw FormatError(ex.what());
  }
  return e;
}

void append_entry_line(std::string &out, const PhraseEntry &e) {
  out.append(e.src.text());
  out.append(kFieldSeparator);
  out.append(e.tgt.text());
  out.append(kFieldSeparator);
  for (std::size_t k = 0; k < kNumCoreScores; ++k) {
    if (k > 0) out.push_back(' ');
    text::append_double(out, e.scores.core[k]);
  }
  for (double x : e.scores.extras) {
    out.push_back(' ');
    text::append_double(out, x);
  }
  if (e.alignment.empty()) {
    out.append(" |||");
  } else {
    out.append(kFieldSeparator);
    append_alignment(out, e.alignment);
  }
  out.push_back('\n');
}

PhraseTableReader::PhraseTableReader(std::istream &in, ReadOptions options)
    : in_(in), options_(options) {
  if (!read_line()) return;
  std::string_view first = line_;
  if (first.starts_with(kFeaturesHeader)) {
    std::vector<std::string> names;
    for (std::string_view n : text::split_ws(first.substr(kFeaturesHeader.size()))) {
      names.emplace_back(n);
    }
    try {
      manifest_ = Manifest(std::move(names));
    } catch (const std::invalid_argument &e) {
      throw FormatError(line_no_, e.what());
    }
  } else {
    pending_ = true;
  }
}

bool PhraseTableReader::read_line() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_ != "\r") return true;
  }
  if (in_.bad()) throw std::runtime_error("I/O error while reading phrase table");
  return false;
}

bool PhraseTableReader::next(PhraseEntry &entry) {
  if (!pending_ && !read_line()) return false;
  pending_ = false;
  try {
    entry = parse_entry_line(line_, manifest_, options_);
  } catch (const FormatError &e) {
    throw FormatError(line_no_, e.reason());
  }
  return true;
}

PhraseTableWriter::PhraseTableWriter(std::ostream &out, const Manifest &manifest) : out_(out) {
  if (manifest.num_extras() > 0) {
    std::string header(kFeaturesHeader);
    for (const std::string &n : manifest.extras()) {
      header.push_back(' ');
      header.append(n);
    }
    header.push_back('\n');
    out_.write(header.data(), static_cast<std::streamsize>(header.size()));
  }
}

void PhraseTableWriter::write(const PhraseEntry &entry) {
  buf_.clear();
  append_entry_line(buf_, entry);
  out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  ++written_;
}

PhraseTable parse_phrase_table(std::istream &in, const ReadOptions &options) {
  PhraseTableReader reader(in, options);
  std::vector<PhraseEntry> entries;
  PhraseEntry e;
  while (reader.next(e)) entries.push_back(std::move(e));
  try {
    return PhraseTable(reader.manifest(), std::move(entries));
  } catch (const std::invalid_argument &ex) {
    throw FormatError(ex.what());
  }
}

void write_phrase_table(const PhraseTable &table, std::ostream &out) {
  PhraseTableWriter writer(out, table.manifest());
  for (const PhraseEntry &e : table) writer.write(e);
  if (!out) throw std::runtime_error("I/O error while writing phrase table");
}

PhraseTable read_phrase_table_file(const std::string &path, const ReadOptions &options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_phrase_table(in, options);
}

void write_phrase_table_file(const PhraseTable &table, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create '" + path + "'");
  write_phrase_table(table, out);
}

}  // namespace pivotsmith
