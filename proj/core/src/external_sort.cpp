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

#include "pivotsmith/external_sort.hpp"

#include <stdlib.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <queue>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace pivotsmith {

std::filesystem::path default_scratch_root() {
  if (const char *env = std::getenv("PIVOTSMITH_TMPDIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::temp_directory_path();
}

ScratchDir::ScratchDir(const std::filesystem::path &root) {
  std::filesystem::create_directories(root);
  std::string tmpl = (root / "pivotsmith-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw std::system_error(errno, std::generic_category(),
                            "cannot create scratch directory under " + root.string());
  }
  path_ = tmpl;
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path ScratchDir::next_file(std::string_view stem) {
  return path_ / (std::string(stem) + "-" + std::to_string(counter_++));
}

namespace detail {

// One sorted run on disk; deleted with the object.
class RunFile {
 public:
  explicit RunFile(std::filesystem::path path) : path_(std::move(path)) {}
  ~RunFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace detail

namespace {

constexpr std::size_t kWriteBuffer = std::size_t{1} << 20;
constexpr std::size_t kReadBuffer = std::size_t{256} << 10;

struct FileCloser {
  void operator()(std::FILE *f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode, std::size_t buffer) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  }
  std::setvbuf(f.get(), nullptr, _IOFBF, buffer);
  return f;
}

class RunWriter {
 public:
  explicit RunWriter(const std::filesystem::path &path)
      : file_(open_file(path, "wb", kWriteBuffer)), path_(path) {}

  void write(std::string_view key, std::string_view payload) {
    std::uint32_t header[2] = {static_cast<std::uint32_t>(key.size()),
                               static_cast<std::uint32_t>(payload.size())};
    put(header, sizeof header);
    put(key.data(), key.size());
    put(payload.data(), payload.size());
  }

  void close() {
    if (std::fflush(file_.get()) != 0) fail();
    file_.reset();
  }

 private:
  void put(const void *data, std::size_t n) {
    if (n > 0 && std::fwrite(data, 1, n, file_.get()) != n) fail();
  }
  [[noreturn]] void fail() {
    throw std::system_error(errno, std::generic_category(),
                            "write failed on scratch file " + path_.string());
  }

  FilePtr file_;
  std::filesystem::path path_;
};

class RunReader {
 public:
  explicit RunReader(std::shared_ptr<detail::RunFile> run)
      : run_(std::move(run)), file_(open_file(run_->path(), "rb", kReadBuffer)) {}

  bool next() {
    std::uint32_t header[2];
    std::size_t got = std::fread(header, 1, sizeof header, file_.get());
    if (got == 0 && std::feof(file_.get())) return false;
    if (got != sizeof header) fail();
    key_len_ = header[0];
    buf_.resize(std::size_t{header[0]} + header[1]);
    if (!buf_.empty() && std::fread(buf_.data(), 1, buf_.size(), file_.get()) != buf_.size()) {
      fail();
    }
    return true;
  }

  std::string_view key() const { return std::string_view(buf_).substr(0, key_len_); }
  std::string_view payload() const { return std::string_view(buf_).substr(key_len_); }

 private:
  [[noreturn]] void fail() {
    throw std::runtime_error("truncated scratch file " + run_->path().string());
  }

  std::shared_ptr<detail::RunFile> run_;
  FilePtr file_;
  std::string buf_;
  std::size_t key_len_ = 0;
};

// k-way merge; ties resolved by run order, which preserves insertion order.
class Merger {
 public:
  explicit Merger(const std::vector<std::shared_ptr<detail::RunFile>> &runs) {
    readers_.reserve(runs.size());
    for (const auto &r : runs) readers_.push_back(std::make_unique<RunReader>(r));
    for (std::size_t i = 0; i < readers_.size(); ++i) {
      if (readers_[i]->next()) heap_.push(i);
    }
  }

  bool next() {
    if (current_ != kNone) {
      if (readers_[current_]->next()) heap_.push(current_);
      current_ = kNone;
    }
    if (heap_.empty()) return false;
    current_ = heap_.top();
    heap_.pop();
    return true;
  }

  std::string_view key() const { return readers_[current_]->key(); }
  std::string_view payload() const { return readers_[current_]->payload(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Greater {
    const Merger *m;
    bool operator()(std::size_t a, std::size_t b) const {
      int c = m->readers_[a]->key().compare(m->readers_[b]->key());
      if (c != 0) return c > 0;
      return a > b;
    }
  };

  std::vector<std::unique_ptr<RunReader>> readers_;
  std::priority_queue<std::size_t, std::vector<std::size_t>, Greater> heap_{Greater{this}};
  std::size_t current_ = kNone;
};

std::uint64_t key_prefix(std::string_view key) {
  unsigned char bytes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::memcpy(bytes, key.data(), std::min<std::size_t>(8, key.size()));
  std::uint64_t p = 0;
  for (unsigned char b : bytes) p = (p << 8) | b;
  return p;
}

}  // namespace

class SortedRecords::Source {
 public:
  virtual ~Source() = default;
  virtual bool next() = 0;
  virtual std::string_view key() const = 0;
  virtual std::string_view payload() const = 0;
};

namespace {

class MemorySource final : public SortedRecords::Source {
 public:
  MemorySource(std::vector<char> arena, std::vector<ExternalSorter::Slot> slots)
      : arena_(std::move(arena)), slots_(std::move(slots)) {}

  bool next() override {
    if (pos_ >= slots_.size()) return false;
    ++pos_;
    return true;
  }
  std::string_view key() const override {
    const auto &s = slots_[pos_ - 1];
    return {arena_.data() + s.offset, s.key_len};
  }
  std::string_view payload() const override {
    const auto &s = slots_[pos_ - 1];
    return {arena_.data() + s.offset + s.key_len, s.payload_len};
  }

 private:
  std::vector<char> arena_;
  std::vector<ExternalSorter::Slot> slots_;
  std::size_t pos_ = 0;
};

class MergeSource final : public SortedRecords::Source {
 public:
  MergeSource(std::shared_ptr<ScratchDir> scratch,
              std::vector<std::shared_ptr<detail::RunFile>> runs)
      : scratch_(std::move(scratch)), runs_(std::move(runs)), merger_(runs_) {}

  bool next() override { return merger_.next(); }
  std::string_view key() const override { return merger_.key(); }
  std::string_view payload() const override { return merger_.payload(); }

 private:
  std::shared_ptr<ScratchDir> scratch_;
  std::vector<std::shared_ptr<detail::RunFile>> runs_;
  Merger merger_;
};

class EmptySource final : public SortedRecords::Source {
 public:
  bool next() override { return false; }
  std::string_view key() const override { return {}; }
  std::string_view payload() const override { return {}; }
};

}  // namespace

SortedRecords::SortedRecords() : source_(std::make_unique<EmptySource>()) {}
SortedRecords::SortedRecords(std::unique_ptr<Source> source) : source_(std::move(source)) {}
SortedRecords::SortedRecords(SortedRecords &&) noexcept = default;
SortedRecords &SortedRecords::operator=(SortedRecords &&) noexcept = default;
SortedRecords::~SortedRecords() = default;

bool SortedRecords::next() { return source_->next(); }
std::string_view SortedRecords::key() const { return source_->key(); }
std::string_view SortedRecords::payload() const { return source_->payload(); }

ExternalSorter::ExternalSorter(SortOptions options) : options_(std::move(options)) {
  if (options_.max_fan_in < 2) options_.max_fan_in = 2;
  if (options_.threads == 0) options_.threads = 1;
}

ExternalSorter::~ExternalSorter() = default;

std::size_t ExternalSorter::used_bytes() const {
  return arena_.size() + slots_.size() * sizeof(Slot);
}

void ExternalSorter::add(std::string_view key, std::string_view payload) {
  if (key.size() > UINT32_MAX || payload.size() > UINT32_MAX) {
    throw std::length_error("sort record too large");
  }
  std::size_t need = key.size() + payload.size() + sizeof(Slot);
  if (!slots_.empty() && used_bytes() + need > options_.memory_bytes) spill();
  if (arena_.capacity() == 0) arena_.reserve(options_.memory_bytes / 4 * 3);
  Slot s{key_prefix(key), arena_.size(), static_cast<std::uint32_t>(key.size()),
         static_cast<std::uint32_t>(payload.size())};
  arena_.insert(arena_.end(), key.begin(), key.end());
  arena_.insert(arena_.end(), payload.begin(), payload.end());
  slots_.push_back(s);
  ++records_;
}

void ExternalSorter::sort_slots() {
  const char *base = arena_.data();
  auto less = [base](const Slot &a, const Slot &b) {
    if (a.prefix != b.prefix) return a.prefix < b.prefix;
    std::string_view ka(base + a.offset, a.key_len);
    std::string_view kb(base + b.offset, b.key_len);
    return ka < kb;
  };
  std::size_t parts = std::min<std::size_t>(options_.threads, slots_.size() / 4096 + 1);
  if (parts <= 1) {
    std::stable_sort(slots_.begin(), slots_.end(), less);
    return;
  }
  std::vector<std::size_t> bounds(parts + 1);
  for (std::size_t i = 0; i <= parts; ++i) bounds[i] = slots_.size() * i / parts;
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < parts; ++i) {
      workers.emplace_back([&, i] {
        std::stable_sort(slots_.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                         slots_.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]), less);
      });
    }
  }
  for (std::size_t i = 1; i < parts; ++i) {
    std::inplace_merge(slots_.begin(), slots_.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                       slots_.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]), less);
  }
}

void ExternalSorter::spill() {
  sort_slots();
  if (!scratch_) {
    scratch_ = std::make_shared<ScratchDir>(options_.tmpdir.empty() ? default_scratch_root()
                                                                    : options_.tmpdir);
  }
  auto run = std::make_shared<detail::RunFile>(scratch_->next_file("run"));
  RunWriter writer(run->path());
  for (const Slot &s : slots_) {
    writer.write({arena_.data() + s.offset, s.key_len},
                 {arena_.data() + s.offset + s.key_len, s.payload_len});
  }
  writer.close();
  runs_.push_back(std::move(run));
  ++runs_spilled_;
  arena_.clear();
  slots_.clear();
}

SortedRecords ExternalSorter::finish() {
  if (runs_.empty()) {
    sort_slots();
    auto src = std::make_unique<MemorySource>(std::move(arena_), std::move(slots_));
    arena_ = {};
    slots_ = {};
    return SortedRecords(std::move(src));
  }
  if (!slots_.empty()) spill();
  // Bound the number of simultaneously open runs. Merging a prefix of the
  // run list into one run keeps equal keys in insertion order.
  while (runs_.size() > options_.max_fan_in) {
    std::vector<std::shared_ptr<detail::RunFile>> group(
        runs_.begin(), runs_.begin() + static_cast<std::ptrdiff_t>(options_.max_fan_in));
    auto merged = std::make_shared<detail::RunFile>(scratch_->next_file("merge"));
    {
      Merger m(group);
      RunWriter writer(merged->path());
      while (m.next()) writer.write(m.key(), m.payload());
      writer.close();
    }
    runs_.erase(runs_.begin(), runs_.begin() + static_cast<std::ptrdiff_t>(options_.max_fan_in));
    runs_.insert(runs_.begin(), std::move(merged));
  }
  auto src = std::make_unique<MergeSource>(scratch_, std::move(runs_));
  runs_ = {};
  arena_ = {};
  slots_ = {};
  return SortedRecords(std::move(src));
}

}  // namespace pivotsmith
