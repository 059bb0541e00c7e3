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
// Byte-record external merge sort. Records are (key, payload) byte strings
// ordered by unsigned lexicographic key comparison; records with equal keys
// keep insertion order. Memory is bounded by SortOptions::memory_bytes plus
// the merge buffers, independent of the number of records.

#ifndef PIVOTSMITH_EXTERNAL_SORT_HPP_
#define PIVOTSMITH_EXTERNAL_SORT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pivotsmith {

namespace detail {
class RunFile;
}

// $PIVOTSMITH_TMPDIR when set, else the system temporary directory.
std::filesystem::path default_scratch_root();

// Uniquely named directory removed (recursively) on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::filesystem::path &root);
  ~ScratchDir();
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path next_file(std::string_view stem);

 private:
  std::filesystem::path path_;
  std::uint64_t counter_ = 0;
};

struct SortOptions {
  std::filesystem::path tmpdir;  // empty: default_scratch_root()
  std::size_t memory_bytes = std::size_t{128} << 20;
  unsigned threads = 1;
  std::size_t max_fan_in = 64;
};

// Sequential reader over sorted records. Views stay valid until next().
class SortedRecords {
 public:
  class Source;

  SortedRecords();
  explicit SortedRecords(std::unique_ptr<Source> source);
  SortedRecords(SortedRecords &&) noexcept;
  SortedRecords &operator=(SortedRecords &&) noexcept;
  ~SortedRecords();

  bool next();
  std::string_view key() const;
  std::string_view payload() const;

 private:
  std::unique_ptr<Source> source_;
};

class ExternalSorter {
 public:
  explicit ExternalSorter(SortOptions options = {});
  ~ExternalSorter();
  ExternalSorter(const ExternalSorter &) = delete;
  ExternalSorter &operator=(const ExternalSorter &) = delete;

  void add(std::string_view key, std::string_view payload);
  // Ends input. The sorter is left empty and may be reused.
  SortedRecords finish();

  std::uint64_t records_added() const { return records_; }
  std::size_t runs_spilled() const { return runs_spilled_; }

  struct Slot {
    std::uint64_t prefix;
    std::uint64_t offset;
    std::uint32_t key_len;
    std::uint32_t payload_len;
  };

 private:
  void spill();
  void sort_slots();
  std::size_t used_bytes() const;

  SortOptions options_;
  std::vector<char> arena_;
  std::vector<Slot> slots_;
  std::shared_ptr<ScratchDir> scratch_;
  std::vector<std::shared_ptr<detail::RunFile>> runs_;
  std::uint64_t records_ = 0;
  std::size_t runs_spilled_ = 0;
};

}  // namespace pivotsmith

#endif  // PIVOTSMITH_EXTERNAL_SORT_HPP_
