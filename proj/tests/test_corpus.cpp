#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sth/corpus.hpp"
#include "sth/rng.hpp"
#include "support/oracles.hpp"

using namespace sth;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sparse(in);
}

Corpus counts(std::vector<std::vector<TermWeight>> rows, std::int32_t m) {
  std::vector<SparseDocVector> docs;
  for (std::size_t i = 0; i < rows.size(); ++i) docs.push_back({static_cast<DocId>(i), rows[i], Label{0}});
  return Corpus(std::move(docs), m);
}

}  // namespace

TEST(LoadSparse, LabelAndOneBasedIndices) {
  const auto c = parse("3 1:0.5 7:1.2\n");
  ASSERT_EQ(c.size(), 1U);
  EXPECT_EQ(c[0].label, Label{3});
  ASSERT_EQ(c[0].entries.size(), 2U);
  EXPECT_EQ(c[0].entries[0], (TermWeight{0, 0.5}));
  EXPECT_EQ(c[0].entries[1], (TermWeight{6, 1.2}));
  EXPECT_EQ(c.vocab_size(), 7);
}

TEST(LoadSparse, EmptyInput) {
  const auto c = parse("");
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.vocab_size(), 0);
}

TEST(LoadSparse, CommentsAndDirective) {
  const auto c = parse("# vocab_size: 40\n# just a comment\n\n2 3:1 # trailing\n5:2\n");
  ASSERT_EQ(c.size(), 2U);
  EXPECT_EQ(c.vocab_size(), 40);
  EXPECT_FALSE(c[1].label.has_value());
  EXPECT_EQ(c[1].doc_id, 1);
}

TEST(LoadSparse, Errors) {
  EXPECT_THROW(parse("1 5:0.1 5:0.2\n"), ParseError);
  EXPECT_THROW(parse("1 5:-0.1\n"), ParseError);
  EXPECT_THROW(parse("1 7:1 5:1\n"), ParseError);
  EXPECT_THROW(parse("1 0:1\n"), ParseError);
  EXPECT_THROW(parse("x 1:1\n"), ParseError);
  EXPECT_THROW(parse("# vocab_size: 2\n1 5:1\n"), ParseError);
  try {
    parse("1 1:1\n2 2:1\n1 3:abc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3U);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadSparse, RoundTripProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto original = oracle::random_sparse_corpus(rng, 1 + rng.uniform_index(30), 50, 1 + rng.uniform_index(10));
    std::stringstream buffer;
    write_sparse(original, buffer);
    const auto first = parse_sparse(buffer);
    EXPECT_EQ(first, original);
    std::stringstream again;
    write_sparse(first, again);
    EXPECT_EQ(parse_sparse(again), first);
  }
}

TEST(CorpusInvariants, RejectsViolations) {
  EXPECT_THROW(Corpus({{0, {{2, 1.0}, {1, 1.0}}, {}}}, 5), std::invalid_argument);
  EXPECT_THROW(Corpus({{0, {{5, 1.0}}, {}}}, 5), std::invalid_argument);
  EXPECT_THROW(Corpus({{0, {{1, NAN}}, {}}}, 5), std::invalid_argument);
  EXPECT_THROW(Corpus({{0, {}, {}}, {0, {}, {}}}, 5), std::invalid_argument);
}

TEST(TfIdf, TermInEveryDocumentDrops) {
  const auto w = tfidf_weight(counts({{{0, 1}, {1, 3}}, {{0, 2}}}, 2));
  EXPECT_TRUE(w[1].entries.empty());
  ASSERT_EQ(w[0].entries.size(), 1U);
  EXPECT_EQ(w[0].entries[0].index, 1);
  EXPECT_DOUBLE_EQ(w[0].entries[0].weight, 3 * std::log(2.0));
}

TEST(TfIdf, HandArithmetic) {
  // Four documents, term 0 only in the first with tf = 2: weight 2 ln 4.
  const auto w = tfidf_weight(counts({{{0, 2}, {1, 1}}, {{1, 1}}, {{1, 1}, {2, 1}}, {{1, 4}}}, 3));
  ASSERT_EQ(w[0].entries.size(), 1U);
  EXPECT_NEAR(w[0].entries[0].weight, 2.0 * std::log(4.0), 1e-15);
  EXPECT_NEAR(w[2].entries[0].weight, std::log(4.0), 1e-15);
  EXPECT_TRUE(tfidf_weight(Corpus{}).empty());
}

TEST(TfIdf, MatchesIndependentRecount) {
  Rng rng(3);
  const auto raw = oracle::random_sparse_corpus(rng, 40, 30, 6);
  const auto weighted = tfidf_weight(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::size_t kept = 0;
    for (const auto& e : raw[i].entries) {
      std::size_t df = 0;
      for (const auto& d : raw.docs())
        for (const auto& f : d.entries) df += f.index == e.index ? 1 : 0;
      if (df == raw.size()) continue;
      const auto& got = weighted[i].entries.at(kept++);
      EXPECT_EQ(got.index, e.index);
      EXPECT_NEAR(got.weight, e.weight * std::log(40.0 / static_cast<double>(df)), 1e-12);
    }
    EXPECT_EQ(kept, weighted[i].entries.size());
  }
}

TEST(DropZeroNorm, ReportsExcludedDocuments) {
  std::vector<std::string> warnings;
  auto previous = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  std::vector<DocId> dropped;
  const auto kept = drop_zero_norm(counts({{{0, 1}}, {}, {{1, 0.0}}}, 2), &dropped);
  set_warning_sink(previous);
  EXPECT_EQ(kept.size(), 1U);
  EXPECT_EQ(dropped, (std::vector<DocId>{1, 2}));
  EXPECT_EQ(warnings.size(), 2U);
}

TEST(Tokenize, Basics) {
  Vocabulary vocab;
  const auto doc = tokenize_basic("The cat sat", {"the"}, vocab);
  ASSERT_EQ(doc.entries.size(), 2U);
  EXPECT_EQ(vocab.words(), (std::vector<std::string>{"cat", "sat"}));
  EXPECT_EQ(doc.entries[0], (TermWeight{0, 1.0}));
  EXPECT_EQ(doc.entries[1], (TermWeight{1, 1.0}));

  EXPECT_TRUE(tokenize_basic("", {}, vocab).entries.empty());

  Vocabulary fresh;
  const auto folded = tokenize_basic("cat cat CAT", {}, fresh);
  ASSERT_EQ(folded.entries.size(), 1U);
  EXPECT_EQ(folded.entries[0].weight, 3.0);
  const auto split_on_punct = tokenize_basic("cat,dog;cat-42", {}, fresh);
  EXPECT_EQ(fresh.size(), 3);
  EXPECT_EQ(split_on_punct.entries.size(), 3U);
}

TEST(Split, SizesAndDeterminism) {
  Rng rng(5);
  const auto c = oracle::random_sparse_corpus(rng, 10, 20, 3);
  const auto a = split(c, 0.6, 42);
  EXPECT_EQ(a.train.size(), 6U);
  EXPECT_EQ(a.test.size(), 4U);
  const auto b = split(c, 0.6, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);

  std::set<DocId> all;
  for (const auto& d : a.train.docs()) all.insert(d.doc_id);
  for (const auto& d : a.test.docs()) EXPECT_TRUE(all.insert(d.doc_id).second);
  EXPECT_EQ(all.size(), c.size());

  EXPECT_THROW(split(c, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(split(c, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(split(Corpus{}, 0.5, 1), std::invalid_argument);
}

TEST(Split, RoundingRule) {
  // 0.6 * 9394 = 5636.4 rounds to 5636.
  EXPECT_EQ(split_train_size(9394, 0.6), 5636U);
  EXPECT_EQ(split_train_size(5, 0.5), 3U);
}

TEST(TextDirectory, TopicsFromDirectoryNames) {
  const auto root = std::filesystem::temp_directory_path() / "sth_text_dir_test";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root / "beta");
  std::filesystem::create_directories(root / "alpha");
  std::ofstream(root / "alpha" / "a.txt") << "Apple banana apple";
  std::ofstream(root / "beta" / "b.txt") << "banana cherry";
  Vocabulary vocab;
  const auto tc = load_text_directory(root, default_stopwords(), vocab);
  std::filesystem::remove_all(root);
  EXPECT_EQ(tc.label_names, (std::vector<std::string>{"alpha", "beta"}));
  ASSERT_EQ(tc.counts.size(), 2U);
  EXPECT_EQ(tc.counts[0].label, Label{0});
  EXPECT_EQ(tc.counts[1].label, Label{1});
  EXPECT_EQ(tc.counts.vocab_size(), 3);
  EXPECT_EQ(tc.counts[0].entries[0], (TermWeight{0, 2.0}));
}
