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

#ifndef PIVOTSMITH_PHRASE_HPP_
#define PIVOTSMITH_PHRASE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pivotsmith {

inline constexpr std::size_t kDefaultMaxPhraseLength = 8;
// Alignment positions are stored in one byte.
inline constexpr std::size_t kMaxPhraseLengthLimit = 255;

// A non-empty sequence of tokens. Tokens contain no byte <= 0x20 and no
// "|||", so the space-joined text orders exactly like the token sequence.
class Phrase {
 public:
  Phrase() = default;

  // Tokens are separated by runs of spaces/tabs; throws std::invalid_argument.
  static Phrase parse(std::string_view text,
                      std::size_t max_length = kDefaultMaxPhraseLength);
  static Phrase from_tokens(std::span<const std::string> tokens,
                            std::size_t max_length = kDefaultMaxPhraseLength);
  // No validation; `text` must already be in canonical form.
  static Phrase from_canonical(std::string text);

  const std::string &text() const { return text_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::vector<std::string_view> tokens() const;

  friend bool operator==(const Phrase &a, const Phrase &b) { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const Phrase &a, const Phrase &b) {
    int c = a.text_.compare(b.text_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  std::string text_;
  std::uint32_t size_ = 0;
};

// Throws std::invalid_argument naming the offending token.
void validate_token(std::string_view token);

struct AlignmentLink {
  std::uint16_t src = 0;
  std::uint16_t tgt = 0;

  friend auto operator<=>(const AlignmentLink &, const AlignmentLink &) = default;
};

// Sorted, duplicate-free link set.
using Alignment = std::vector<AlignmentLink>;

// Parses "i-j i-j ...". Duplicates and out-of-range indices throw
// std::invalid_argument; the result is sorted.
Alignment parse_alignment(std::string_view text, std::size_t src_len, std::size_t tgt_len);
void append_alignment(std::string &out, const Alignment &alignment);

// Sorts and removes duplicates in place.
void normalize_alignment(Alignment &alignment);

}  // namespace pivotsmith

#endif  // PIVOTSMITH_PHRASE_HPP_
