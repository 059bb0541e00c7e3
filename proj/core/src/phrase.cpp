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

#include "pivotsmith/phrase.hpp"

#include <algorithm>
#include <stdexcept>

#include "pivotsmith/text.hpp"

namespace pivotsmith {

void validate_token(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("empty token");
  for (unsigned char c : token) {
    if (c <= 0x20) {
      throw std::invalid_argument("token contains whitespace or control byte: '" +
                                  std::string(token) + "'");
    }
  }
  if (token.find("|||") != std::string_view::npos) {
    throw std::invalid_argument("token contains '|||': '" + std::string(token) + "'");
  }
}

Phrase Phrase::parse(std::string_view text, std::size_t max_length) {
  std::vector<std::string_view> toks = text::split_ws(text);
  if (toks.empty()) throw std::invalid_argument("empty phrase");
  if (toks.size() > std::min(max_length, kMaxPhraseLengthLimit)) {
    throw std::invalid_argument("phrase has " + std::to_string(toks.size()) +
                                " tokens, limit is " + std::to_string(max_length));
  }
  Phrase p;
  for (std::string_view t : toks) {
    validate_token(t);
    if (!p.text_.empty()) p.text_.push_back(' ');
    p.text_.append(t);
  }
  p.size_ = static_cast<std::uint32_t>(toks.size());
  return p;
}

Phrase Phrase::from_tokens(std::span<const std::string> tokens, std::size_t max_length) {
  if (tokens.empty()) throw std::invalid_argument("empty phrase");
  if (tokens.size() > std::min(max_length, kMaxPhraseLengthLimit)) {
    throw std::invalid_argument("phrase has " + std::to_string(tokens.size()) +
                                " tokens, limit is " + std::to_string(max_length));
  }
  Phrase p;
  for (const std::string &t : tokens) {
    validate_token(t);
    if (!p.text_.empty()) p.text_.push_back(' ');
    p.text_.append(t);
  }
  p.size_ = static_cast<std::uint32_t>(tokens.size());
  return p;
}

Phrase Phrase::from_canonical(std::string text) {
  Phrase p;
  p.size_ = text.empty()
                ? 0
                : static_cast<std::uint32_t>(std::count(text.begin(), text.end(), ' ') + 1);
  p.text_ = std::move(text);
  return p;
}

std::vector<std::string_view> Phrase::tokens() const { return text::split_ws(text_); }

Alignment parse_alignment(std::string_view text, std::size_t src_len, std::size_t tgt_len) {
  Alignment out;
  for (std::string_view item : text::split_ws(text)) {
    std::size_t dash = item.find('-');
    unsigned long long i = 0, j = 0;
    if (dash == std::string_view::npos || !text::parse_uint(item.substr(0, dash), i) ||
        !text::parse_uint(item.substr(dash + 1), j)) {
      throw std::invalid_argument("malformed alignment link '" + std::string(item) + "'");
    }
    if (i >= src_len || j >= tgt_len) {
      throw std::invalid_argument("alignment index out of range in '" + std::string(item) +
                                  "'");
    }
    out.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)});
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument("duplicate alignment link");
  }
  return out;
}

void append_alignment(std::string &out, const Alignment &alignment) {
  bool first = true;
  for (const AlignmentLink &l : alignment) {
    if (!first) out.push_back(' ');
    first = false;
    out.append(std::to_string(l.src));
    out.push_back('-');
    out.append(std::to_string(l.tgt));
  }
}

void normalize_alignment(Alignment &alignment) {
  std::sort(alignment.begin(), alignment.end());
  alignment.erase(std::unique(alignment.begin(), alignment.end()), alignment.end());
}

}  // namespace pivotsmith
