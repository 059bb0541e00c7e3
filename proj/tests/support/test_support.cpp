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

#include "test_support.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <limits>
#include <stdexcept>

#include "pivotsmith/cli.hpp"
#include "pivotsmith/text.hpp"

extern char **environ;

namespace pstest {

using pivotsmith::Alignment;
using pivotsmith::AlignmentLink;
using pivotsmith::Manifest;
using pivotsmith::Phrase;
using pivotsmith::PhraseEntry;
using pivotsmith::PhraseTable;

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "pstest-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::vector<std::string> &args, const std::string &stdin_text) {
  std::istringstream in(stdin_text);
  std::ostringstream out;
  std::ostringstream err;
  CliResult r;
  r.rc = pivotsmith::cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

ProcessResult run_process(const std::vector<std::string> &argv, const std::string &stdout_path,
                          const std::string &stderr_path) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, stdout_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, 2, stderr_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  std::vector<char *> cargv;
  for (const std::string &a : argv) cargv.push_back(const_cast<char *>(a.c_str()));
  cargv.push_back(nullptr);

  ProcessResult r;
  auto start = std::chrono::steady_clock::now();
  pid_t pid = 0;
  int rc = posix_spawn(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("posix_spawn failed for " + argv[0]);
  int status = 0;
  struct rusage usage {};
  if (wait4(pid, &status, 0, &usage) < 0) throw std::runtime_error("wait4 failed");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.peak_rss_kb = usage.ru_maxrss;
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return r;
}

double floor6(double v) {
  if (v <= 0.0) return 0.0;
  int e = static_cast<int>(std::floor(std::log10(v)));
  double scale = std::pow(10.0, 5 - e);
  double r = std::floor(v * scale) / scale;
  // Parse back through the text form so the value is exactly what a reader sees.
  double parsed = 0.0;
  pivotsmith::text::parse_double(pivotsmith::text::format_double(r, 6), parsed);
  return parsed;
}

std::vector<std::string> random_phrases(Rng &rng, const std::string &prefix, std::size_t count,
                                        std::size_t vocab, std::size_t max_len) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  std::uniform_int_distribution<std::size_t> len_d(1, max_len);
  std::uniform_int_distribution<std::size_t> tok_d(0, vocab - 1);
  for (std::size_t attempts = 0; out.size() < count && attempts < count * 100; ++attempts) {
    std::size_t len = len_d(rng);
    std::string p;
    for (std::size_t k = 0; k < len; ++k) {
      if (k > 0) p.push_back(' ');
      p += prefix + std::to_string(tok_d(rng));
    }
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

namespace {

std::size_t count_tokens(const std::string &p) {
  return static_cast<std::size_t>(std::count(p.begin(), p.end(), ' ')) + 1;
}

Alignment random_alignment(Rng &rng, std::size_t n, std::size_t m, double density) {
  std::bernoulli_distribution keep(density);
  Alignment a;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (keep(rng)) a.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)});
    }
  }
  return a;
}

}  // namespace

PhraseTable random_normalized_table(Rng &rng, const std::vector<std::string> &left,
                                    const std::vector<std::string> &right,
                                    std::size_t max_entries, double density,
                                    double link_density) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::bernoulli_distribution keep(density);
  for (std::size_t l = 0; l < left.size(); ++l) {
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (keep(rng)) pairs.emplace_back(l, r);
    }
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  if (pairs.size() > max_entries) pairs.resize(max_entries);

  std::uniform_real_distribution<double> wd(0.05, 1.0);
  std::vector<double> w_phi(pairs.size()), w_lex(pairs.size());
  std::map<std::size_t, double> phi_l, phi_r, lex_l, lex_r;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    w_phi[k] = wd(rng);
    w_lex[k] = wd(rng);
    phi_l[pairs[k].first] += w_phi[k];
    phi_r[pairs[k].second] += w_phi[k];
    lex_l[pairs[k].first] += w_lex[k];
    lex_r[pairs[k].second] += w_lex[k];
  }
  std::vector<PhraseEntry> entries;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [l, r] = pairs[k];
    PhraseEntry e;
    e.src = Phrase::parse(left[l]);
    e.tgt = Phrase::parse(right[r]);
    e.scores.core = {floor6(w_phi[k] / phi_l[l]), floor6(w_lex[k] / lex_l[l]),
                     floor6(w_phi[k] / phi_r[r]), floor6(w_lex[k] / lex_r[r])};
    e.alignment = random_alignment(rng, e.src.size(), e.tgt.size(), link_density);
    entries.push_back(std::move(e));
  }
  return PhraseTable(Manifest{}, std::move(entries));
}

PivotCase random_pivot_case(Rng &rng, const RandomPivotParams &p) {
  auto s = random_phrases(rng, "s", p.sources, p.vocab, p.max_phrase_len);
  auto e = random_phrases(rng, "e", p.pivots, p.vocab, p.max_phrase_len);
  auto t = random_phrases(rng, "t", p.targets, p.vocab, p.max_phrase_len);
  PivotCase c;
  c.sp = random_normalized_table(rng, s, e, p.max_entries, p.density, p.link_density);
  c.pt = random_normalized_table(rng, e, t, p.max_entries, p.density, p.link_density);
  return c;
}

double oracle_score(const PhraseEntry &entry, const Manifest &manifest, const WeightMap &weights,
                    double fallback) {
  std::vector<std::string> names = manifest.all_names();
  std::vector<double> values(entry.scores.core.begin(), entry.scores.core.end());
  values.insert(values.end(), entry.scores.extras.begin(), entry.scores.extras.end());
  double total = 0.0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    auto it = weights.find(names[k]);
    double w = it == weights.end() ? fallback : it->second;
    total += w * std::log(std::max(values[k], 1e-9));
  }
  return total;
}

std::vector<PhraseEntry> oracle_top_n(const PhraseTable &table, const WeightMap &weights,
                                      std::size_t n) {
  std::map<std::string, std::vector<std::pair<double, const PhraseEntry *>>> groups;
  for (const PhraseEntry &e : table) {
    groups[e.src.text()].emplace_back(oracle_score(e, table.manifest(), weights), &e);
  }
  std::vector<PhraseEntry> out;
  for (auto &[src, group] : groups) {
    std::sort(group.begin(), group.end(), [](const auto &a, const auto &b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second->tgt.text() < b.second->tgt.text();
    });
    std::vector<PhraseEntry> kept;
    for (std::size_t k = 0; k < group.size() && k < n; ++k) kept.push_back(*group[k].second);
    std::sort(kept.begin(), kept.end(),
              [](const PhraseEntry &a, const PhraseEntry &b) { return a.tgt.text() < b.tgt.text(); });
    for (PhraseEntry &e : kept) out.push_back(std::move(e));
  }
  return out;
}

OracleTable oracle_pivot(const PhraseTable &sp, const PhraseTable &pt, std::size_t top_n,
                         const WeightMap &w_sp, const WeightMap &w_pt, std::size_t min_links) {
  std::vector<PhraseEntry> a = oracle_top_n(sp, w_sp, top_n);
  std::vector<PhraseEntry> b = oracle_top_n(pt, w_pt, top_n);
  OracleTable out;
  for (const PhraseEntry &x : a) {
    for (const PhraseEntry &y : b) {
      if (x.tgt.text() != y.src.text()) continue;
      OracleEntry &o = out[{x.src.text(), y.tgt.text()}];
      for (std::size_t k = 0; k < 4; ++k) o.core[k] += x.scores.core[k] * y.scores.core[k];
      for (const AlignmentLink &l1 : x.alignment) {
        for (const AlignmentLink &l2 : y.alignment) {
          if (l1.tgt == l2.src) o.links.emplace(l1.src, l2.tgt);
        }
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = it->second.links.size() < min_links ? out.erase(it) : std::next(it);
  }
  return out;
}

std::string compare_with_oracle(const PhraseTable &got, const OracleTable &want,
                                double tolerance) {
  std::ostringstream msg;
  if (got.size() != want.size()) {
    msg << "entry count " << got.size() << " != oracle " << want.size();
    return msg.str();
  }
  auto it = want.begin();
  for (const PhraseEntry &e : got) {
    const auto &[key, o] = *it++;
    if (e.src.text() != key.first || e.tgt.text() != key.second) {
      msg << "pair '" << e.src.text() << "' / '" << e.tgt.text() << "' != oracle '" << key.first
          << "' / '" << key.second << "'";
      return msg.str();
    }
    for (std::size_t k = 0; k < 4; ++k) {
      if (std::fabs(e.scores.core[k] - o.core[k]) > tolerance) {
        msg << "score " << k << " of '" << key.first << "' / '" << key.second
            << "': " << e.scores.core[k] << " != " << o.core[k];
        return msg.str();
      }
    }
    std::set<std::pair<int, int>> links;
    for (const AlignmentLink &l : e.alignment) links.emplace(l.src, l.tgt);
    if (links != o.links || links.size() != e.alignment.size()) {
      msg << "alignment of '" << key.first << "' / '" << key.second << "' differs";
      return msg.str();
    }
    if (!e.scores.extras.empty()) return "unexpected extra columns";
  }
  return {};
}

double oracle_best_segmentation(const std::vector<std::string> &sentence,
                                const PhraseTable &table, const WeightMap &weights,
                                std::size_t max_phrase_len, double unknown_penalty) {
  std::map<std::string, double> best;
  for (const PhraseEntry &e : table) {
    if (e.src.size() > max_phrase_len) continue;
    double s = oracle_score(e, table.manifest(), weights);
    auto [it, fresh] = best.emplace(e.src.text(), s);
    if (!fresh) it->second = std::max(it->second, s);
  }
  const std::size_t n = sentence.size();
  double top = -std::numeric_limits<double>::infinity();
  if (n == 0) return 0.0;
  // Bit k of `cuts` set: a phrase boundary after token k.
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    double total = 0.0;
    bool ok = true;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < n && ok; ++k) {
      bool boundary = k + 1 == n || ((cuts >> k) & 1u) != 0;
      if (!boundary) continue;
      std::size_t len = k + 1 - begin;
      std::string phrase;
      for (std::size_t i = begin; i <= k; ++i) phrase += (i > begin ? " " : "") + sentence[i];
      auto it = best.find(phrase);
      if (len <= max_phrase_len && it != best.end()) {
        total += it->second;
      } else if (len == 1 && it == best.end()) {
        total += unknown_penalty;
      } else {
        ok = false;
      }
      begin = k + 1;
    }
    if (ok) top = std::max(top, total);
  }
  return top;
}

namespace {

const std::vector<std::vector<std::string>> kWorldValues = {
    {"noun", "adj", "verb"},      // Pos
    {"Masc", "Fem", "-"},         // Gen
    {"Singular", "Dual", "Plural"},  // Num
    {"Det", "NoDet"},             // Det
};

std::string fc_of(const std::map<std::string, pivotsmith::MorphValues> &words,
                  std::string_view word) {
  auto it = words.find(std::string(word));
  if (it == words.end()) return "[UNK]";
  std::string tag = "[";
  bool first = true;
  for (int f = 1; f <= 3; ++f) {
    const std::string &v = it->second[f];
    if (v == "-") continue;
    if (!first) tag += "+";
    tag += v;
    first = false;
  }
  return tag + "]";
}

std::vector<std::string> split_tokens(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

}  // namespace

MorphWorld random_morph_world(Rng &rng, std::size_t words_per_side) {
  MorphWorld w;
  pivotsmith::LexiconBuilder src_b, tgt_b;
  auto pick = [&](int f) {
    const auto &vals = kWorldValues[static_cast<std::size_t>(f)];
    return vals[std::uniform_int_distribution<std::size_t>(0, vals.size() - 1)(rng)];
  };
  for (std::size_t k = 0; k < words_per_side; ++k) {
    pivotsmith::MorphValues sv, tv;
    for (int f = 0; f < 4; ++f) {
      sv[static_cast<std::size_t>(f)] = pick(f);
      tv[static_cast<std::size_t>(f)] = pick(f);
    }
    std::string sw = "a" + std::to_string(k), tw = "h" + std::to_string(k);
    w.src_words[sw] = sv;
    w.tgt_words[tw] = tv;
    src_b.add(sw, sv);
    tgt_b.add(tw, tv);
  }
  w.src_lex = src_b.build();
  w.tgt_lex = tgt_b.build();

  std::bernoulli_distribution coin(0.4);
  for (int f = 0; f < 4; ++f) {
    for (const std::string &a : kWorldValues[static_cast<std::size_t>(f)]) {
      for (const std::string &b : kWorldValues[static_cast<std::size_t>(f)]) {
        if (!coin(rng)) continue;
        w.rules.emplace(f, a, b);
        w.rule_mapping.add(static_cast<pivotsmith::MorphFeature>(f), a, b);
      }
    }
  }

  std::set<std::string> src_tags{"[UNK]"}, tgt_tags{"[UNK]"};
  for (const auto &[word, v] : w.src_words) src_tags.insert(fc_of(w.src_words, word));
  for (const auto &[word, v] : w.tgt_words) tgt_tags.insert(fc_of(w.tgt_words, word));
  std::uniform_real_distribution<double> pd(0.0, 1.0);
  for (const std::string &s : src_tags) {
    for (const std::string &t : tgt_tags) {
      if (!coin(rng)) continue;
      double a = floor6(pd(rng)), b = floor6(pd(rng));
      w.fc[{s, t}] = {a, b};
      w.fc_model.set(s, t, {a, b});
    }
  }
  return w;
}

PhraseEntry random_morph_entry(Rng &rng, const MorphWorld &world) {
  std::uniform_int_distribution<std::size_t> len_d(1, 5);
  std::uniform_int_distribution<std::size_t> word_d(0, world.src_words.size());
  auto make = [&](const char *prefix) {
    std::vector<std::string> toks(len_d(rng));
    for (std::string &t : toks) {
      std::size_t k = word_d(rng);
      // The extra index is a word outside the lexicon.
      t = k == world.src_words.size() ? std::string(prefix) + "unk" : prefix + std::to_string(k);
    }
    return Phrase::from_tokens(toks);
  };
  PhraseEntry e;
  e.src = make("a");
  e.tgt = make("h");
  e.scores.core = {0.5, 0.5, 0.5, 0.5};
  e.alignment = random_alignment(rng, e.src.size(), e.tgt.size(), 0.4);
  return e;
}

std::pair<double, double> transcribe_rule_scores(const PhraseEntry &entry,
                                                 const MorphWorld &world,
                                                 const std::vector<int> &features) {
  std::vector<std::string> s = split_tokens(entry.src.text());
  std::vector<std::string> t = split_tokens(entry.tgt.text());
  const double n = static_cast<double>(s.size());
  const double m = static_cast<double>(t.size());
  const double F = static_cast<double>(features.size());
  double w_s = 0.0, w_t = 0.0;
  for (int f : features) {
    for (const AlignmentLink &l : entry.alignment) {
      auto si = world.src_words.find(s[l.src]);
      auto tj = world.tgt_words.find(t[l.tgt]);
      if (si == world.src_words.end() || tj == world.tgt_words.end()) continue;
      std::size_t k = static_cast<std::size_t>(f);
      if (world.rules.count({f, si->second[k], tj->second[k]}) != 0) {
        w_s += 1.0 / (F * n);
        w_t += 1.0 / (F * m);
      }
    }
  }
  return {w_s, w_t};
}

std::pair<double, double> transcribe_induced_scores(const PhraseEntry &entry,
                                                    const MorphWorld &world) {
  std::vector<std::string> s = split_tokens(entry.src.text());
  std::vector<std::string> t = split_tokens(entry.tgt.text());
  double w_s = 0.0, w_t = 0.0;
  for (const AlignmentLink &l : entry.alignment) {
    auto it = world.fc.find({fc_of(world.src_words, s[l.src]), fc_of(world.tgt_words, t[l.tgt])});
    if (it == world.fc.end()) continue;
    w_s += it->second.second / static_cast<double>(s.size());
    w_t += it->second.first / static_cast<double>(t.size());
  }
  return {w_s, w_t};
}

void write_scale_tables(const ScaleShape &shape, const std::string &sp_path,
                        const std::string &pt_path) {
  const std::size_t sources_per_pivot = shape.sources * shape.pivots_per_source / shape.pivots;
  std::string buf;
  auto flush = [&](std::FILE *f, bool force) {
    if (force || buf.size() > (1u << 20)) {
      std::fwrite(buf.data(), 1, buf.size(), f);
      buf.clear();
    }
  };
  auto scores = [&](double fwd, double bwd) {
    using pivotsmith::text::append_double;
    append_double(buf, fwd);
    buf.push_back(' ');
    append_double(buf, fwd * 0.5);
    buf.push_back(' ');
    append_double(buf, bwd);
    buf.push_back(' ');
    append_double(buf, bwd * 0.5);
  };

  std::FILE *sp = std::fopen(sp_path.c_str(), "wb");
  if (sp == nullptr) throw std::runtime_error("cannot write " + sp_path);
  for (std::size_t i = 0; i < shape.sources; ++i) {
    for (std::size_t k = 0; k < shape.pivots_per_source; ++k) {
      std::size_t j = (i * shape.pivots_per_source + k) % shape.pivots;
      buf += "src" + std::to_string(i) + " w" + std::to_string(i % 13) + " ||| piv" +
             std::to_string(j) + " ||| ";
      scores(1.0 / static_cast<double>(shape.pivots_per_source),
             1.0 / static_cast<double>(sources_per_pivot));
      buf += " ||| 0-0 1-0\n";
      flush(sp, false);
    }
  }
  flush(sp, true);
  std::fclose(sp);

  std::FILE *pt = std::fopen(pt_path.c_str(), "wb");
  if (pt == nullptr) throw std::runtime_error("cannot write " + pt_path);
  for (std::size_t j = 0; j < shape.pivots; ++j) {
    for (std::size_t k = 0; k < shape.targets_per_pivot; ++k) {
      std::size_t t = (j * shape.targets_per_pivot + k) % shape.pivots;
      buf += "piv" + std::to_string(j) + " ||| tgt" + std::to_string(t) + " v" +
             std::to_string(t % 7) + " ||| ";
      double p = 1.0 / static_cast<double>(shape.targets_per_pivot);
      scores(p, p);
      buf += " ||| 0-0 0-1\n";
      flush(pt, false);
    }
  }
  flush(pt, true);
  std::fclose(pt);
}

}  // namespace pstest
