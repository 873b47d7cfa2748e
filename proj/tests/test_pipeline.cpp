#include <gtest/gtest.h>

#include <sstream>

#include "sth/pipeline.hpp"
#include "sth/synthetic_corpus.hpp"

using namespace sth;

namespace {

Corpus small_corpus() {
  SyntheticCorpusOptions opts;
  opts.documents = 300;
  opts.topics = 5;
  opts.vocabulary = 1500;
  opts.seed = 5;
  return synthetic_tfidf_corpus(opts);
}

}  // namespace

TEST(Pipeline, DeterministicAndThreadInvariant) {
  const auto corpus = small_corpus();
  PipelineConfig cfg;
  cfg.k = 10;
  cfg.bits = 8;
  cfg.seed = 3;
  std::vector<std::string> warnings;
  auto previous = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  const auto a = train_sth(corpus, cfg);
  cfg.threads = 4;
  const auto b = train_sth(corpus, cfg);
  set_warning_sink(previous);
  EXPECT_EQ(a.binarized.codes, b.binarized.codes);
  EXPECT_EQ(a.model.weights, b.model.weights);
  EXPECT_EQ(training_diagnostics(a, cfg).dump(), training_diagnostics(b, cfg).dump());
  for (int p = 0; p < 8; ++p) EXPECT_LE(a.binarized.codes.on_count(p), corpus.size() / 2);
}

TEST(Pipeline, StageErrorsNameTheStage) {
  const auto corpus = small_corpus();
  PipelineConfig cfg;
  cfg.k = corpus.size();
  try {
    train_sth(corpus, cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "graph");
  }
  cfg.k = 10;
  cfg.bits = 65;
  EXPECT_THROW(train_sth(corpus, cfg), std::invalid_argument);
}

TEST(Pipeline, EmbeddingFileRoundTrip) {
  Embedding<double> e;
  e.coords = Eigen::MatrixXd::Random(5, 3);
  e.eigenvalues = Eigen::Vector3d(0.1, 0.25, 1.0 / 3.0);
  BinarizationThresholds t{{0.5, -1e-300, 7.0}};
  std::stringstream buffer;
  write_embedding(e, t, buffer);
  BinarizationThresholds back_t;
  const auto back = read_embedding(buffer, &back_t);
  EXPECT_EQ(back.coords, e.coords);
  EXPECT_EQ(back.eigenvalues, e.eigenvalues);
  EXPECT_EQ(back_t.values, t.values);
}

TEST(Pipeline, DefaultCodeLengths) {
  EXPECT_EQ(default_code_lengths(16), (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(default_code_lengths(20), (std::vector<int>{4, 8, 16, 20}));
  EXPECT_EQ(default_code_lengths(64), (std::vector<int>{4, 8, 16, 32, 64}));
  EXPECT_EQ(default_code_lengths(2), (std::vector<int>{2}));
}

TEST(Pipeline, BitCorrelations) {
  CodeMatrix codes{2, {0b01, 0b10, 0b01, 0b10}};
  const auto c = bit_correlations(codes);
  EXPECT_NEAR(c(0, 1), -1.0, 1e-12);
  EXPECT_NEAR(c(0, 0), 1.0, 1e-12);
}
