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

#include "pivotsmith/combine.hpp"

#include <algorithm>
#include <stdexcept>

namespace pivotsmith {

PhraseTable combine_tables(const std::vector<OriginTable> &tables) {
  if (tables.size() < 2) throw std::invalid_argument("combine needs at least two tables");

  std::vector<std::string> extras;
  for (const OriginTable &t : tables) {
    for (const std::string &name : t.table.manifest().extras()) {
      if (std::find(extras.begin(), extras.end(), name) == extras.end()) extras.push_back(name);
    }
  }
  const std::size_t shared = extras.size();
  for (std::size_t k = 0; k < tables.size(); ++k) {
    std::string column = std::string(kOriginPrefix) + tables[k].origin;
    if (std::find(extras.begin(), extras.end(), column) != extras.end()) {
      throw std::invalid_argument("origin name '" + tables[k].origin +
                                  "' is repeated or already present");
    }
    extras.push_back(std::move(column));
  }
  Manifest manifest(std::move(extras));

  std::size_t total = 0;
  for (const OriginTable &t : tables) total += t.table.size();
  std::vector<PhraseEntry> out;
  out.reserve(total);
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const Manifest &m = tables[k].table.manifest();
    std::vector<std::size_t> column_of;
    for (const std::string &name : m.extras()) {
      column_of.push_back(*manifest.extra_index(name));
    }
    for (const PhraseEntry &e : tables[k].table) {
      PhraseEntry c;
      c.src = e.src;
      c.tgt = e.tgt;
      c.alignment = e.alignment;
      c.scores.core = e.scores.core;
      c.scores.extras.assign(manifest.num_extras(), 0.0);
      for (std::size_t x = 0; x < e.scores.extras.size(); ++x) {
        c.scores.extras[column_of[x]] = e.scores.extras[x];
      }
      c.scores.extras[shared + k] = 1.0;
      out.push_back(std::move(c));
    }
  }
  return PhraseTable(std::move(manifest), std::move(out));
}

}  // namespace pivotsmith
