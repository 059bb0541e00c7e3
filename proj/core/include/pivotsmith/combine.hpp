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

#ifndef PIVOTSMITH_COMBINE_HPP_
#define PIVOTSMITH_COMBINE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "pivotsmith/phrase_table.hpp"

namespace pivotsmith {

struct OriginTable {
  PhraseTable table;
  std::string origin;
};

// Flattens several tables into one. Every input entry appears exactly once;
// a pair present in several inputs stays a separate entry per input. The
// output manifest is the union of the input extras (missing values 0.0)
// followed by one indicator column "origin_<name>" per input.
// Throws std::invalid_argument for fewer than two tables, repeated or
// malformed origin names, or origin columns that already exist.
PhraseTable combine_tables(const std::vector<OriginTable> &tables);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_COMBINE_HPP_
