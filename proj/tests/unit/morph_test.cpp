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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pivotsmith/morph.hpp"
#include "pivotsmith/text.hpp"
#include "test_support.hpp"

namespace pivotsmith {
namespace {

MorphLexicon lexicon_from(const std::string &tsv, FcTagStyle style = {}) {
  std::istringstream in(tsv);
  return build_lexicon(in, style);
}

TEST(Morph, FeatureNames) {
  EXPECT_EQ(parse_feature("gen"), MorphFeature::kGen);
  EXPECT_EQ(parse_feature("NUM"), MorphFeature::kNum);
  EXPECT_FALSE(parse_feature("case").has_value());
  EXPECT_EQ(parse_feature_list("gen,det"),
            (std::vector<MorphFeature>{MorphFeature::kGen, MorphFeature::kDet}));
  EXPECT_THROW(parse_feature_list("gen,foo"), std::invalid_argument);
  EXPECT_THROW(parse_feature_list(""), std::invalid_argument);
}

TEST(Morph, RenderFcTag) {
  MorphValues v{"noun", "Fem", "Dual", "Det"};
  EXPECT_EQ(render_fc_tag(v), "[Fem+Dual+Det]");
  EXPECT_EQ(render_fc_tag(v, {true}), "[noun+Fem+Dual+Det]");
  v[1] = "-";
  EXPECT_EQ(render_fc_tag(v), "[Dual+Det]");
}

TEST(Lexicon, MajorityAndTies) {
  MorphLexicon lex = lexicon_from(
      "bait\tnoun\tMasc\tSingular\tNoDet\n"
      "bait\tnoun\tFem\tSingular\tNoDet\n"
      "bait\tnoun\tFem\tSingular\tDet\n"
      "\n"
      "kalb\tnoun\tMasc\tPlural\tDet\n"
      "kalb\tadj\tFem\tDual\tNoDet\n");
  const LexiconEntry *b = lex.find("bait");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->count, 3u);
  EXPECT_EQ(b->mle[static_cast<std::size_t>(MorphFeature::kGen)], "Fem");
  EXPECT_EQ(b->mle[static_cast<std::size_t>(MorphFeature::kDet)], "NoDet");
  // All three combinations seen once: the smallest rendering wins.
  EXPECT_EQ(b->fc_tag, "[Fem+Singular+Det]");
  const LexiconEntry *k = lex.find("kalb");
  ASSERT_NE(k, nullptr);
  EXPECT_EQ(k->mle[static_cast<std::size_t>(MorphFeature::kPos)], "adj");
  EXPECT_EQ(k->fc_tag, "[Fem+Dual+NoDet]");
  EXPECT_EQ(lex.fc_tag("nothing"), kUnknownFcTag);
}

TEST(Lexicon, OrderIndependentAndMergeable) {
  std::vector<std::string> sentences;
  pstest::Rng rng(4);
  const char *genders[] = {"Masc", "Fem", "-"};
  for (int s = 0; s < 60; ++s) {
    std::string block;
    for (int w = 0; w < 4; ++w) {
      block += "w" + std::to_string(rng() % 7) + "\tnoun\t" + genders[rng() % 3] + "\tSingular\t" +
               (rng() % 2 ? "Det" : "NoDet") + "\n";
    }
    sentences.push_back(block);
  }
  auto join = [](const std::vector<std::string> &v) {
    std::string out;
    for (const std::string &s : v) out += s + "\n";
    return out;
  };
  MorphLexicon a = lexicon_from(join(sentences));
  std::shuffle(sentences.begin(), sentences.end(), rng);
  EXPECT_EQ(lexicon_from(join(sentences)), a);

  LexiconBuilder left, right;
  std::istringstream l(join({sentences.begin(), sentences.begin() + 25}));
  std::istringstream r(join({sentences.begin() + 25, sentences.end()}));
  left.add_tagged_corpus(l);
  right.add_tagged_corpus(r);
  left.merge(right);
  EXPECT_EQ(left.build(), a);

  std::ostringstream out;
  write_lexicon(a, out);
  std::istringstream back(out.str());
  EXPECT_EQ(parse_lexicon(back), a);
}

TEST(Lexicon, ReportsBadRows) {
  try {
    lexicon_from("a\tnoun\tMasc\tSingular\tDet\nb\tnoun\tMasc\n");
    FAIL();
  } catch (const FormatError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Rules, BundledTable) {
  const RuleMapping &r = default_rules();
  EXPECT_EQ(r.size(), 13u);
  EXPECT_TRUE(r.allows(MorphFeature::kGen, "Feminine", "Both"));
  EXPECT_FALSE(r.allows(MorphFeature::kGen, "Masculine", "Feminine"));
  EXPECT_TRUE(r.allows(MorphFeature::kNum, "Plural", "Singular-Plural"));
  EXPECT_FALSE(r.allows(MorphFeature::kNum, "Singular", "Dual-Plural"));
  EXPECT_TRUE(r.allows(MorphFeature::kDet, "Determiner", "Determiner"));
  EXPECT_FALSE(r.allows(MorphFeature::kPos, "noun", "noun"));
  EXPECT_TRUE(r.swapped().allows(MorphFeature::kGen, "Both", "Feminine"));
}

TEST(Rules, InstalledFileMatchesEmbeddedCopy) {
  std::string file = pstest::read_file(PIVOTSMITH_RULES_FILE);
  EXPECT_EQ(file, std::string(default_rules_tsv()));
  std::istringstream in(file);
  RuleMapping loaded = load_rules(in);
  for (MorphFeature f : default_features()) EXPECT_EQ(loaded.pairs(f), default_rules().pairs(f));
}

TEST(Rules, LoadErrorsAndRoundTrip) {
  std::istringstream bad("CASE\tNom\tNom\n");
  EXPECT_THROW(load_rules(bad), FormatError);
  std::istringstream short_row("GEN\tFeminine\n");
  EXPECT_THROW(load_rules(short_row), FormatError);
  std::ostringstream out;
  write_rules(default_rules(), out);
  std::istringstream back(out.str());
  RuleMapping r = load_rules(back);
  EXPECT_EQ(r.size(), 13u);
}

// Lexicons where every word has one fixed analysis.
struct TinyWorld {
  MorphLexicon src;
  MorphLexicon tgt;
  TinyWorld() {
    src = lexicon_from(
        "A1\tnoun\tFem\tDual\tDet\n"
        "A2\tnoun\tMasc\tSingular\tNoDet\n");
    tgt = lexicon_from(
        "H1\tnoun\tFem\tDual\tDet\n"
        "H2\tnoun\tFem\tSingular\t-\n"
        "H3\tnoun\tMasc\tSingular\tNoDet\n");
  }
};

FcModel train(const TinyWorld &w, const std::string &src, const std::string &tgt,
              const std::string &align) {
  std::istringstream s(src), t(tgt), a(align);
  return train_fc_model(s, t, a, w.src, w.tgt);
}

TEST(FcTraining, DeterministicCorpusGivesCertainty) {
  TinyWorld w;
  FcModel m = train(w, "A1 A2\nA2\n", "H1 H3\nH3\n", "0-0 1-1\n0-0\n");
  EXPECT_DOUBLE_EQ(m.p_tgt_given_src("[Fem+Dual+Det]", "[Fem+Dual+Det]"), 1.0);
  EXPECT_DOUBLE_EQ(m.p_src_given_tgt("[Fem+Dual+Det]", "[Fem+Dual+Det]"), 1.0);
  EXPECT_DOUBLE_EQ(m.p_tgt_given_src("[Masc+Singular+NoDet]", "[Masc+Singular+NoDet]"), 1.0);
  EXPECT_EQ(m.p_tgt_given_src("[Fem+Dual+Det]", "[Masc+Singular+NoDet]"), 0.0);
}

TEST(FcTraining, ThreeToOneCounts) {
  TinyWorld w;
  FcModel m = train(w, "A1\nA1\nA1\nA1\n", "H1\nH1\nH1\nH3\n", "0-0\n0-0\n0-0\n0-0\n");
  EXPECT_NEAR(m.p_tgt_given_src("[Fem+Dual+Det]", "[Fem+Dual+Det]"), 0.75, 1e-12);
  EXPECT_NEAR(m.p_tgt_given_src("[Fem+Dual+Det]", "[Masc+Singular+NoDet]"), 0.25, 1e-12);
  EXPECT_NEAR(m.p_src_given_tgt("[Fem+Dual+Det]", "[Masc+Singular+NoDet]"), 1.0, 1e-12);
}

TEST(FcTraining, OneToManyLinksFormTagSequences) {
  TinyWorld w;
  FcModel m = train(w, "A1\n", "H1 H2\n", "0-1 0-0\n");
  EXPECT_DOUBLE_EQ(m.p_tgt_given_src("[Fem+Dual+Det]", "[Fem+Dual+Det] [Fem+Singular]"), 1.0);
  // Each target word sees the single source word.
  EXPECT_DOUBLE_EQ(m.p_src_given_tgt("[Fem+Dual+Det]", "[Fem+Singular]"), 1.0);
}

TEST(FcTraining, UnknownWordsAndUnalignedWords) {
  TinyWorld w;
  FcModel m = train(w, "A1 X\n", "Y H1 H3\n", "1-0\n");
  EXPECT_DOUBLE_EQ(m.p_tgt_given_src("[UNK]", "[UNK]"), 1.0);
  EXPECT_EQ(m.size(), 1u);
}

TEST(FcTraining, ConditionalsSumToOne) {
  pstest::Rng rng(17);
  pstest::MorphWorld world = pstest::random_morph_world(rng, 12);
  std::string src, tgt, align;
  for (int s = 0; s < 300; ++s) {
    PhraseEntry e = pstest::random_morph_entry(rng, world);
    src += e.src.text() + "\n";
    tgt += e.tgt.text() + "\n";
    std::string links;
    append_alignment(links, e.alignment);
    align += links + "\n";
  }
  std::istringstream s(src), t(tgt), a(align);
  FcModel m = train_fc_model(s, t, a, world.src_lex, world.tgt_lex);
  std::map<std::string, double> fwd, bwd;
  for (const auto &[sf, row] : m.entries()) {
    for (const auto &[tf, p] : row) {
      // Multi-word keys only carry the opposite direction.
      if (sf.find(' ') == std::string::npos) fwd[sf] += p.tgt_given_src;
      if (tf.find(' ') == std::string::npos) bwd[tf] += p.src_given_tgt;
    }
  }
  ASSERT_FALSE(fwd.empty());
  for (const auto &[k, v] : fwd) EXPECT_NEAR(v, 1.0, 1e-9) << k;
  for (const auto &[k, v] : bwd) EXPECT_NEAR(v, 1.0, 1e-9) << k;
}

TEST(FcTraining, RejectsMismatchedInputs) {
  TinyWorld w;
  EXPECT_THROW(train(w, "A1\nA2\n", "H1\n", "0-0\n0-0\n"), FormatError);
  EXPECT_THROW(train(w, "A1\n", "H1\n", "0-3\n"), FormatError);
}

TEST(FcModelFile, RoundTrip) {
  FcModel m;
  m.set("[Fem+Dual+Det]", "[Fem+Dual+Det]", {0.0148, 0.3333});
  m.set("[Fem+Dual+Det]", "[Fem+Singular] [Fem+Dual]", {0.0052, 0.0833});
  std::ostringstream out;
  write_fc_model(m, out);
  EXPECT_EQ(out.str(),
            "[Fem+Dual+Det]\t[Fem+Dual+Det]\t0.0148\t0.3333\n"
            "[Fem+Dual+Det]\t[Fem+Singular] [Fem+Dual]\t0.0052\t0.0833\n");
  std::istringstream in(out.str());
  EXPECT_EQ(parse_fc_model(in), m);
  std::istringstream bad("[A]\t[B]\t1.5\t0.1\n");
  EXPECT_THROW(parse_fc_model(bad), FormatError);
}

}  // namespace
}  // namespace pivotsmith
