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
// Small text helpers shared by the table, lexicon and model readers.

#ifndef PIVOTSMITH_TEXT_HPP_
#define PIVOTSMITH_TEXT_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pivotsmith {

// Malformed input. `line()` is 1-based, 0 when the position is unknown.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string &reason);
  explicit FormatError(const std::string &reason) : FormatError(0, reason) {}

  std::size_t line() const { return line_; }
  const std::string &reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

namespace text {

// Splits on every occurrence of `sep`; adjacent separators give empty fields.
std::vector<std::string_view> split(std::string_view s, std::string_view sep);

// Splits on runs of ASCII space/tab; no empty fields.
std::vector<std::string_view> split_ws(std::string_view s);

std::string_view trim(std::string_view s);

// Strict numeric parsing: the whole field must be consumed.
bool parse_double(std::string_view s, double &out);
bool parse_uint(std::string_view s, unsigned long long &out);

// Shortest "%.{digits}g" rendering; -0 prints as 0.
void append_double(std::string &out, double value, int significant_digits = 6);
std::string format_double(double value, int significant_digits = 6);

// Fixed-point rendering ("%.{decimals}f").
std::string format_fixed(double value, int decimals);

std::string to_lower(std::string_view s);

}  // namespace text
}  // namespace pivotsmith

#endif  // PIVOTSMITH_TEXT_HPP_
