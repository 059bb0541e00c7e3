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

#include "pivotsmith/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pivotsmith/bleu.hpp"
#include "pivotsmith/combine.hpp"
#include "pivotsmith/decoder.hpp"
#include "pivotsmith/features.hpp"
#include "pivotsmith/morph.hpp"
#include "pivotsmith/parallel.hpp"
#include "pivotsmith/phrase_table.hpp"
#include "pivotsmith/text.hpp"
#include "pivotsmith/triangulate.hpp"
#include "pivotsmith/weights.hpp"

namespace pivotsmith::cli {

namespace {

constexpr std::string_view kStdio = "-";

// Bad input data; the message already names the offending file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flag combination detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string display_name(const std::string &path) {
  return path == kStdio ? "<stdin>" : path;
}

struct Io {
  std::istream &in;
  std::ostream &out;
  std::ostream &err;
  bool stdin_taken = false;
};

// An input stream that is either a file or the process stdin.
class Input {
 public:
  Input(Io &io, const std::string &path) : name_(display_name(path)) {
    if (path == kStdio) {
      if (io.stdin_taken) throw UsageError("standard input requested more than once");
      io.stdin_taken = true;
      stream_ = &io.in;
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw DataError(path + ": cannot open for reading");
      stream_ = file_.get();
    }
  }
  std::istream &stream() { return *stream_; }
  const std::string &name() const { return name_; }

 private:
  std::string name_;
  std::unique_ptr<std::ifstream> file_;
  std::istream *stream_ = nullptr;
};

class Output {
 public:
  Output(Io &io, const std::string &path) : name_(path == kStdio ? "<stdout>" : path) {
    if (path == kStdio) {
      stream_ = &io.out;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw DataError(path + ": cannot open for writing");
      stream_ = file_.get();
    }
  }
  std::ostream &stream() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_) file_->close();
    if (!*stream_) throw DataError(name_ + ": write failed");
  }

 private:
  std::string name_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream *stream_ = nullptr;
};

// Runs `fn`, prefixing parse errors with the input name.
template <typename Fn>
auto with_context(const std::string &name, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError &e) {
    throw DataError(name + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw DataError(name + ": " + e.what());
  }
}

PhraseTable load_table(Io &io, const std::string &path, const ReadOptions &opts) {
  Input in(io, path);
  return with_context(in.name(), [&] { return parse_phrase_table(in.stream(), opts); });
}

LogLinearWeights load_weights(Io &io, const std::string &path) {
  if (path.empty()) return LogLinearWeights{};
  Input in(io, path);
  return with_context(in.name(), [&] { return parse_weights(in.stream()); });
}

MorphLexicon load_lexicon(Io &io, const std::string &path) {
  Input in(io, path);
  return with_context(in.name(), [&] { return parse_lexicon(in.stream()); });
}

std::vector<std::vector<std::string>> read_sentences(Io &io, const std::string &path) {
  Input in(io, path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in.stream(), line)) {
    std::vector<std::string> toks;
    for (std::string_view t : text::split_ws(text::trim(line))) toks.emplace_back(t);
    out.push_back(std::move(toks));
  }
  if (in.stream().bad()) throw DataError(in.name() + ": read failed");
  return out;
}

unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

void write_table(Io &io, const std::string &path, const PhraseTable &table) {
  Output out(io, path);
  write_phrase_table(table, out.stream());
  out.close();
}

// ---------------------------------------------------------------- pivot

struct PivotArgs {
  std::string sp;
  std::string pt;
  std::string weights_sp;
  std::string weights_pt;
  std::string output = std::string(kStdio);
  std::string reordering_sp;
  std::string reordering_pt;
  std::string reordering_out;
  std::string tmpdir;
  std::size_t top_n = 1000;
  std::size_t min_links = 0;
  std::size_t mem_mb = 384;
  unsigned threads = default_threads();
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
  bool verbose = false;
};

void report_pivot_stats(const PivotStats &st, Io &io, bool verbose) {
  if (st.sp_extras_dropped) {
    io.err << "warning: extra columns of the source-pivot table were dropped\n";
  }
  if (st.pt_extras_dropped) {
    io.err << "warning: extra columns of the pivot-target table were dropped\n";
  }
  if (st.scores_clamped > 0) {
    io.err << "warning: " << st.scores_clamped
           << " composed scores exceeded 1 and were clamped (inputs not normalized?)\n";
  }
  if (!verbose) return;
  io.err << "source-pivot entries: " << st.sp_entries << " (kept " << st.sp_kept << ")\n"
         << "pivot-target entries: " << st.pt_entries << " (kept " << st.pt_kept << ")\n"
         << "shared pivots: " << st.shared_pivots << "\n"
         << "pivot paths: " << st.partial_pairs << "\n"
         << "output entries: " << st.output_entries << "\n"
         << "dropped by link threshold: " << st.dropped_by_links << "\n"
         << "spilled runs: " << st.runs_spilled << "\n";
}

int cmd_pivot(const PivotArgs &a, Io &io) {
  if (a.top_n == 0) throw UsageError("--top-n must be at least 1");
  if (a.max_phrase_len == 0 || a.max_phrase_len > kMaxPhraseLengthLimit) {
    throw UsageError("--max-phrase-len out of range");
  }
  if (a.mem_mb == 0) throw UsageError("--mem-mb must be at least 1");
  int reo_flags = !a.reordering_sp.empty() + !a.reordering_pt.empty() + !a.reordering_out.empty();
  if (reo_flags != 0 && reo_flags != 3) {
    throw UsageError("--reordering-sp, --reordering-pt and --reordering-out go together");
  }

  PivotConfig config;
  config.top_n = a.top_n;
  config.min_alignment_links = a.min_links;
  config.weights_sp = load_weights(io, a.weights_sp);
  config.weights_pt = load_weights(io, a.weights_pt);

  StreamOptions options;
  options.tmpdir = a.tmpdir;
  options.memory_bytes = a.mem_mb << 20;
  options.threads = std::max(1u, a.threads);

  ReadOptions ropts;
  ropts.max_phrase_length = a.max_phrase_len;

  PivotStats stats;
  if (reo_flags == 3) {
    // Reordering needs random access to both tables, so they are loaded.
    PhraseTable sp = load_table(io, a.sp, ropts);
    PhraseTable pt = load_table(io, a.pt, ropts);
    ReorderingTable sp_reo;
    ReorderingTable pt_reo;
    {
      Input in(io, a.reordering_sp);
      sp_reo = with_context(in.name(), [&] {
        return parse_reordering_table(in.stream(), a.max_phrase_len);
      });
    }
    {
      Input in(io, a.reordering_pt);
      pt_reo = with_context(in.name(), [&] {
        return parse_reordering_table(in.stream(), a.max_phrase_len);
      });
    }
    PhraseTable composed = with_context(
        "pivot", [&] { return pivot_compose(sp, pt, config, options, &stats); });
    write_table(io, a.output, composed);
    ReorderingTable reo = pivot_reordering(sp_reo, pt_reo, sp, pt, config);
    Output out(io, a.reordering_out);
    write_reordering_table(reo, out.stream());
    out.close();
    report_pivot_stats(stats, io, a.verbose);
    return kExitOk;
  }

  Input sp_in(io, a.sp);
  Input pt_in(io, a.pt);
  auto sp_reader = with_context(sp_in.name(), [&] {
    return std::make_unique<PhraseTableReader>(sp_in.stream(), ropts);
  });
  auto pt_reader = with_context(pt_in.name(), [&] {
    return std::make_unique<PhraseTableReader>(pt_in.stream(), ropts);
  });
  EntrySource sp_source = [&](PhraseEntry &e) {
    return with_context(sp_in.name(), [&] { return sp_reader->next(e); });
  };
  EntrySource pt_source = [&](PhraseEntry &e) {
    return with_context(pt_in.name(), [&] { return pt_reader->next(e); });
  };

  Output out(io, a.output);
  PhraseTableWriter writer(out.stream(), Manifest{});
  stats = with_context("pivot", [&] {
    return pivot_compose_stream(sp_source, sp_reader->manifest(), pt_source,
                                pt_reader->manifest(), config, options,
                                [&](const PhraseEntry &e) { writer.write(e); });
  });
  out.close();
  report_pivot_stats(stats, io, a.verbose);
  return kExitOk;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
  std::string input = std::string(kStdio);
  std::string output = std::string(kStdio);
  std::string weights;
  std::size_t top_n = 1000;
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
};

int cmd_filter(const FilterArgs &a, Io &io) {
  if (a.top_n == 0) throw UsageError("--top-n must be at least 1");
  LogLinearWeights w = load_weights(io, a.weights);
  PhraseTable table = load_table(io, a.input, ReadOptions{a.max_phrase_len});
  PhraseTable kept = with_context("filter", [&] { return filter_top_n(table, w, a.top_n); });
  write_table(io, a.output, kept);
  return kExitOk;
}

// ---------------------------------------------------------------- annotate

struct AnnotateArgs {
  std::string kind;
  std::string input = std::string(kStdio);
  std::string output = std::string(kStdio);
  std::string rules;
  std::string fc_model;
  std::string src_lex;
  std::string tgt_lex;
  std::string features;
  std::vector<std::string> names;
  bool swap_rules = false;
  unsigned threads = default_threads();
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
};

int cmd_annotate(const AnnotateArgs &a, Io &io) {
  std::pair<std::string, std::string> names;
  if (a.kind == "conn") {
    names = {"conn_s", "conn_t"};
  } else if (a.kind == "rules") {
    names = {"rule_s", "rule_t"};
  } else {
    names = {"morph_s", "morph_t"};
  }
  if (!a.names.empty()) {
    if (a.names.size() != 2) throw UsageError("--names takes exactly two column names");
    names = {a.names[0], a.names[1]};
  }
  if (a.kind != "conn" && (a.src_lex.empty() || a.tgt_lex.empty())) {
    throw UsageError("--kind " + a.kind + " needs --src-lex and --tgt-lex");
  }
  if (a.kind == "induced" && a.fc_model.empty()) {
    throw UsageError("--kind induced needs --fc-model");
  }
  if (a.kind != "rules" && (!a.rules.empty() || a.swap_rules || !a.features.empty())) {
    throw UsageError("--rules, --swap-rules and --features only apply to --kind rules");
  }
  if (a.kind != "induced" && !a.fc_model.empty()) {
    throw UsageError("--fc-model only applies to --kind induced");
  }

  MorphLexicon src_lex;
  MorphLexicon tgt_lex;
  RuleMapping rules;
  FcModel model;
  std::vector<MorphFeature> features = default_features();
  EntryScorer scorer;
  if (a.kind == "conn") {
    scorer = connectivity_scorer();
  } else {
    src_lex = load_lexicon(io, a.src_lex);
    tgt_lex = load_lexicon(io, a.tgt_lex);
    if (a.kind == "rules") {
      if (!a.features.empty()) {
        try {
          features = parse_feature_list(a.features);
        } catch (const std::invalid_argument &e) {
          throw UsageError(std::string("--features: ") + e.what());
        }
      }
      if (a.rules.empty()) {
        rules = default_rules();
      } else {
        Input in(io, a.rules);
        rules = with_context(in.name(), [&] { return load_rules(in.stream()); });
      }
      if (a.swap_rules) rules = rules.swapped();
      scorer = rule_morph_scorer(src_lex, tgt_lex, rules, features);
    } else {
      Input in(io, a.fc_model);
      model = with_context(in.name(), [&] { return parse_fc_model(in.stream()); });
      scorer = induced_morph_scorer(src_lex, tgt_lex, model);
    }
  }

  PhraseTable table = load_table(io, a.input, ReadOptions{a.max_phrase_len});
  PhraseTable annotated = with_context("annotate", [&] {
    return annotate_table(table, scorer, names, std::max(1u, a.threads));
  });
  write_table(io, a.output, annotated);
  return kExitOk;
}

// ---------------------------------------------------------------- lexicon

struct LexiconArgs {
  std::vector<std::string> inputs;
  std::string output = std::string(kStdio);
  bool fc_pos = false;
};

int cmd_lexicon(const LexiconArgs &a, Io &io) {
  FcTagStyle style;
  style.include_pos = a.fc_pos;
  LexiconBuilder builder(style);
  std::vector<std::string> inputs = a.inputs;
  if (inputs.empty()) inputs.emplace_back(kStdio);
  for (const std::string &path : inputs) {
    Input in(io, path);
    with_context(in.name(), [&] { builder.add_tagged_corpus(in.stream()); });
  }
  Output out(io, a.output);
  write_lexicon(builder.build(), out.stream());
  out.close();
  return kExitOk;
}

// ---------------------------------------------------------------- rules-check

struct RulesCheckArgs {
  std::string rules;
  std::vector<std::string> queries;
  bool swap = false;
};

int cmd_rules_check(const RulesCheckArgs &a, Io &io) {
  RuleMapping rules;
  if (a.rules.empty()) {
    rules = default_rules();
  } else {
    Input in(io, a.rules);
    rules = with_context(in.name(), [&] { return load_rules(in.stream()); });
  }
  if (a.swap) rules = rules.swapped();

  std::vector<std::tuple<MorphFeature, std::string, std::string>> parsed;
  for (const std::string &q : a.queries) {
    auto parts = text::split(q, ":");
    std::optional<MorphFeature> f;
    if (parts.size() == 3) f = parse_feature(parts[0]);
    if (!f) throw UsageError("--query expects FEATURE:SRC:TGT, got '" + q + "'");
    parsed.emplace_back(*f, std::string(parts[1]), std::string(parts[2]));
  }

  if (parsed.empty()) {
    io.out << rules.size() << " pairs\n";
    write_rules(rules, io.out);
    return kExitOk;
  }
  for (const auto &[f, src, tgt] : parsed) {
    io.out << feature_name(f) << '\t' << src << '\t' << tgt << '\t'
           << (rules.allows(f, src, tgt) ? "allowed" : "rejected") << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- fc-train

struct FcTrainArgs {
  std::string src;
  std::string tgt;
  std::string align;
  std::string src_lex;
  std::string tgt_lex;
  std::string output = std::string(kStdio);
};

int cmd_fc_train(const FcTrainArgs &a, Io &io) {
  MorphLexicon src_lex = load_lexicon(io, a.src_lex);
  MorphLexicon tgt_lex = load_lexicon(io, a.tgt_lex);
  Input src(io, a.src);
  Input tgt(io, a.tgt);
  Input align(io, a.align);
  FcModel model = with_context(align.name(), [&] {
    return train_fc_model(src.stream(), tgt.stream(), align.stream(), src_lex, tgt_lex);
  });
  Output out(io, a.output);
  write_fc_model(model, out.stream());
  out.close();
  return kExitOk;
}

// ---------------------------------------------------------------- combine

struct CombineArgs {
  std::vector<std::string> inputs;
  std::string output = std::string(kStdio);
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
};

int cmd_combine(const CombineArgs &a, Io &io) {
  if (a.inputs.size() < 2) throw UsageError("combine needs at least two -i tables");
  std::vector<OriginTable> tables;
  for (const std::string &spec : a.inputs) {
    std::string path = spec;
    std::string name;
    std::size_t eq = spec.rfind('=');
    if (eq != std::string::npos) {
      path = spec.substr(0, eq);
      name = spec.substr(eq + 1);
    } else {
      name = std::filesystem::path(spec).stem().string();
    }
    if (path.empty() || name.empty()) throw UsageError("-i expects FILE=NAME, got '" + spec + "'");
    tables.push_back({load_table(io, path, ReadOptions{a.max_phrase_len}), name});
  }
  PhraseTable combined = with_context("combine", [&] { return combine_tables(tables); });
  write_table(io, a.output, combined);
  return kExitOk;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
  std::string table;
  std::string weights;
  std::string input = std::string(kStdio);
  std::string output = std::string(kStdio);
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
  double unknown_penalty = -10.0;
  unsigned threads = default_threads();
};

int cmd_decode(const DecodeArgs &a, Io &io) {
  if (a.max_phrase_len == 0 || a.max_phrase_len > kMaxPhraseLengthLimit) {
    throw UsageError("--max-phrase-len out of range");
  }
  DecodeConfig config;
  config.weights = load_weights(io, a.weights);
  config.max_phrase_len = a.max_phrase_len;
  config.unknown_word_penalty = a.unknown_penalty;
  PhraseTable table = load_table(io, a.table, ReadOptions{a.max_phrase_len});
  MonotoneDecoder decoder = with_context(a.weights.empty() ? "decode" : a.weights,
                                         [&] { return MonotoneDecoder(table, config); });
  std::vector<std::vector<std::string>> sentences = read_sentences(io, a.input);
  std::vector<std::string> lines(sentences.size());
  parallel_for(sentences.size(), std::max(1u, a.threads), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Decoding d = decoder.decode(sentences[i]);
      std::string &line = lines[i];
      for (std::size_t k = 0; k < d.tokens.size(); ++k) {
        if (k > 0) line.push_back(' ');
        line += d.tokens[k];
      }
    }
  });
  Output out(io, a.output);
  for (const std::string &l : lines) out.stream() << l << '\n';
  out.close();
  return kExitOk;
}

// ---------------------------------------------------------------- bleu

struct BleuArgs {
  std::string hyp = std::string(kStdio);
  std::vector<std::string> refs;
};

int cmd_bleu(const BleuArgs &a, Io &io) {
  std::vector<Sentence> hyps = read_sentences(io, a.hyp);
  std::vector<std::vector<Sentence>> refs(hyps.size());
  for (const std::string &path : a.refs) {
    std::vector<Sentence> r = read_sentences(io, path);
    if (r.size() != hyps.size()) {
      throw DataError(display_name(path) + ": " + std::to_string(r.size()) +
                      " reference lines for " + std::to_string(hyps.size()) + " hypotheses");
    }
    for (std::size_t i = 0; i < r.size(); ++i) refs[i].push_back(std::move(r[i]));
  }
  if (hyps.empty()) throw DataError(display_name(a.hyp) + ": empty corpus");
  BleuResult r = with_context("bleu", [&] { return corpus_bleu(hyps, refs); });
  io.out << "BLEU = " << text::format_fixed(r.bleu, 6) << '\n';
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    io.out << "p" << n + 1 << " = " << text::format_fixed(r.precisions[n], 6) << " ("
           << r.stats.matches[n] << '/' << r.stats.totals[n] << ")\n";
  }
  io.out << "BP = " << text::format_fixed(r.brevity_penalty, 6) << " (hyp_len "
         << r.stats.hyp_length << ", ref_len " << r.stats.ref_length << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string input = std::string(kStdio);
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
};

constexpr std::size_t kHistogramBins = 10;

int cmd_stats(const StatsArgs &a, Io &io) {
  Input in(io, a.input);
  ReadOptions ropts{a.max_phrase_len};
  auto reader = with_context(in.name(), [&] {
    return std::make_unique<PhraseTableReader>(in.stream(), ropts);
  });
  const Manifest &manifest = reader->manifest();
  std::vector<std::string> names = manifest.all_names();
  // One row per column: kHistogramBins bins over [0,1] then values outside.
  std::vector<std::array<std::uint64_t, kHistogramBins + 1>> hist(names.size());
  std::unordered_set<std::string> sources;
  std::uint64_t entries = 0;
  std::uint64_t links = 0;
  PhraseEntry e;
  while (with_context(in.name(), [&] { return reader->next(e); })) {
    ++entries;
    links += e.alignment.size();
    sources.insert(e.src.text());
    for (std::size_t k = 0; k < names.size(); ++k) {
      double v = k < kNumCoreScores ? e.scores.core[k] : e.scores.extras[k - kNumCoreScores];
      std::size_t bin;
      if (v < 0.0 || v > 1.0) {
        bin = kHistogramBins;
      } else {
        bin = std::min(kHistogramBins - 1, static_cast<std::size_t>(v * kHistogramBins));
      }
      ++hist[k][bin];
    }
  }

  std::ostream &o = io.out;
  o << "entries\t" << entries << '\n';
  o << "distinct_sources\t" << sources.size() << '\n';
  o << "alignment_links\t" << links << '\n';
  o << "manifest\t";
  for (std::size_t k = 0; k < names.size(); ++k) o << (k ? " " : "") << names[k];
  o << '\n';
  for (std::size_t k = 0; k < names.size(); ++k) {
    o << "histogram\t" << names[k] << '\n';
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      o << "  [" << text::format_fixed(static_cast<double>(b) / kHistogramBins, 1) << ','
        << text::format_fixed(static_cast<double>(b + 1) / kHistogramBins, 1)
        << (b + 1 == kHistogramBins ? "]" : ")") << '\t' << hist[k][b] << '\n';
    }
    o << "  outside\t" << hist[k][kHistogramBins] << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- estimate-size

struct EstimateArgs {
  std::string sp;
  std::string pt;
  std::size_t max_phrase_len = kDefaultMaxPhraseLength;
};

int cmd_estimate(const EstimateArgs &a, Io &io) {
  ReadOptions ropts{a.max_phrase_len};
  PivotSizeEstimator est;
  auto scan = [&](const std::string &path, bool source_side) {
    Input in(io, path);
    with_context(in.name(), [&] {
      PhraseTableReader reader(in.stream(), ropts);
      PhraseEntry e;
      while (reader.next(e)) {
        if (source_side) {
          est.add_source_pivot(e.tgt.text());
        } else {
          est.add_pivot_target(e.src.text());
        }
      }
    });
  };
  scan(a.sp, true);
  scan(a.pt, false);
  io.out << est.total() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_max_len(CLI::App *sub, std::size_t &value) {
  sub->add_option("--max-phrase-len", value, "Longest accepted phrase, in tokens")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, kMaxPhraseLengthLimit));
}

void add_threads(CLI::App *sub, unsigned &value) {
  sub->add_option("--threads", value, "Worker threads (output does not depend on it)")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
}

}  // namespace

int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out,
        std::ostream &err) {
  Io io{in, out, err};
  CLI::App app{"Phrase-pivot translation table toolkit", "pivotsmith"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "pivotsmith 0.1.0");
  std::function<int()> action;

  PivotArgs pivot;
  {
    auto *s = app.add_subcommand("pivot", "Triangulate source-pivot and pivot-target tables");
    s->add_option("--sp", pivot.sp, "Source-pivot phrase table")->required();
    s->add_option("--pt", pivot.pt, "Pivot-target phrase table")->required();
    s->add_option("--top-n", pivot.top_n, "Entries kept per source phrase before joining")
        ->capture_default_str();
    s->add_option("--weights-sp", pivot.weights_sp, "Weights for filtering the sp table");
    s->add_option("--weights-pt", pivot.weights_pt, "Weights for filtering the pt table");
    s->add_option("-o,--output", pivot.output, "Output table")->capture_default_str();
    s->add_option("--reordering-sp", pivot.reordering_sp, "Source-pivot reordering table");
    s->add_option("--reordering-pt", pivot.reordering_pt, "Pivot-target reordering table");
    s->add_option("--reordering-out", pivot.reordering_out, "Composed reordering table");
    s->add_option("--tmpdir", pivot.tmpdir, "Scratch directory (default $PIVOTSMITH_TMPDIR)");
    s->add_option("--min-links", pivot.min_links, "Drop pairs with fewer alignment links")
        ->capture_default_str();
    s->add_option("--mem-mb", pivot.mem_mb, "Sort buffer budget in MiB")->capture_default_str();
    s->add_flag("-v,--verbose", pivot.verbose, "Print join statistics");
    add_threads(s, pivot.threads);
    add_max_len(s, pivot.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_pivot(pivot, io); }; });
  }

  FilterArgs filter;
  {
    auto *s = app.add_subcommand("filter", "Keep the top-n entries per source phrase");
    s->add_option("-i,--input", filter.input, "Input table")->capture_default_str();
    s->add_option("-o,--output", filter.output, "Output table")->capture_default_str();
    s->add_option("--weights", filter.weights, "Log-linear weights file");
    s->add_option("--top-n", filter.top_n, "Entries kept per source phrase")
        ->capture_default_str();
    add_max_len(s, filter.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_filter(filter, io); }; });
  }

  AnnotateArgs annotate;
  {
    auto *s = app.add_subcommand("annotate", "Append a pair of feature columns");
    s->add_option("--kind", annotate.kind, "conn, rules or induced")
        ->required()
        ->check(CLI::IsMember({"conn", "rules", "induced"}));
    s->add_option("-i,--input", annotate.input, "Input table")->capture_default_str();
    s->add_option("-o,--output", annotate.output, "Output table")->capture_default_str();
    s->add_option("--rules", annotate.rules, "Feature value mapping (default: bundled)");
    s->add_option("--fc-model", annotate.fc_model, "FC translation model");
    s->add_option("--src-lex", annotate.src_lex, "Source lexicon");
    s->add_option("--tgt-lex", annotate.tgt_lex, "Target lexicon");
    s->add_option("--features", annotate.features, "Features for rule scoring, e.g. gen,num");
    s->add_option("--names", annotate.names, "Two output column names")->delimiter(',');
    s->add_flag("--swap-rules", annotate.swap_rules, "Apply the mapping target-to-source");
    add_threads(s, annotate.threads);
    add_max_len(s, annotate.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_annotate(annotate, io); }; });
  }

  LexiconArgs lexicon;
  {
    auto *s = app.add_subcommand("lexicon", "Build an MLE lexicon from tagged corpora");
    s->add_option("-i,--input", lexicon.inputs, "Tagged corpus (repeatable)");
    s->add_option("-o,--output", lexicon.output, "Output lexicon")->capture_default_str();
    s->add_flag("--fc-pos", lexicon.fc_pos, "Include the POS in FC tags");
    s->callback([&] { action = [&] { return cmd_lexicon(lexicon, io); }; });
  }

  RulesCheckArgs rules_check;
  {
    auto *s = app.add_subcommand("rules-check", "Validate a rules file or query pairs");
    s->add_option("--rules", rules_check.rules, "Rules file (default: bundled)");
    s->add_option("--query", rules_check.queries, "FEATURE:SRC:TGT (repeatable)");
    s->add_flag("--swap", rules_check.swap, "Query the mapping target-to-source");
    s->callback([&] { action = [&] { return cmd_rules_check(rules_check, io); }; });
  }

  FcTrainArgs fc_train;
  {
    auto *s = app.add_subcommand("fc-train", "Estimate FC translation probabilities");
    s->add_option("--src", fc_train.src, "Source sentences")->required();
    s->add_option("--tgt", fc_train.tgt, "Target sentences")->required();
    s->add_option("--align", fc_train.align, "Word alignments, i-j per link")->required();
    s->add_option("--src-lex", fc_train.src_lex, "Source lexicon")->required();
    s->add_option("--tgt-lex", fc_train.tgt_lex, "Target lexicon")->required();
    s->add_option("-o,--output", fc_train.output, "Output model")->capture_default_str();
    s->callback([&] { action = [&] { return cmd_fc_train(fc_train, io); }; });
  }

  CombineArgs combine;
  {
    auto *s = app.add_subcommand("combine", "Merge tables with origin indicator columns");
    s->add_option("-i,--input", combine.inputs, "FILE=NAME (repeatable)")->required();
    s->add_option("-o,--output", combine.output, "Output table")->capture_default_str();
    add_max_len(s, combine.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_combine(combine, io); }; });
  }

  DecodeArgs decode;
  {
    auto *s = app.add_subcommand("decode", "Monotone decoding of tokenized text");
    s->add_option("--table", decode.table, "Phrase table")->required();
    s->add_option("--weights", decode.weights, "Log-linear weights file");
    s->add_option("--input", decode.input, "Tokenized input")->capture_default_str();
    s->add_option("-o,--output", decode.output, "Hypotheses")->capture_default_str();
    s->add_option("--unk-penalty", decode.unknown_penalty, "Score per copied token")
        ->capture_default_str();
    add_threads(s, decode.threads);
    add_max_len(s, decode.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_decode(decode, io); }; });
  }

  BleuArgs bleu;
  {
    auto *s = app.add_subcommand("bleu", "Corpus BLEU-4");
    s->add_option("--hyp", bleu.hyp, "Hypotheses")->capture_default_str();
    s->add_option("--ref", bleu.refs, "Reference file (repeatable)")->required();
    s->callback([&] { action = [&] { return cmd_bleu(bleu, io); }; });
  }

  StatsArgs stats;
  {
    auto *s = app.add_subcommand("stats", "Entry counts, manifest and score histograms");
    s->add_option("-i,--input", stats.input, "Input table")->capture_default_str();
    add_max_len(s, stats.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_stats(stats, io); }; });
  }

  EstimateArgs estimate;
  {
    auto *s = app.add_subcommand("estimate-size", "Count pivot paths without composing");
    s->add_option("--sp", estimate.sp, "Source-pivot phrase table")->required();
    s->add_option("--pt", estimate.pt, "Pivot-target phrase table")->required();
    add_max_len(s, estimate.max_phrase_len);
    s->callback([&] { action = [&] { return cmd_estimate(estimate, io); }; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp &) {
    const CLI::App *target = &app;
    for (const CLI::App *sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    const CLI::App *target = &app;
    for (const CLI::App *sub : app.get_subcommands()) target = sub;
    err << "pivotsmith: " << e.what() << "\n\n" << target->help();
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError &e) {
    err << "pivotsmith: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError &e) {
    err << "pivotsmith: error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const FormatError &e) {
    err << "pivotsmith: error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception &e) {
    err << "pivotsmith: error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace pivotsmith::cli
