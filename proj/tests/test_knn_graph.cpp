#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "sth/knn_graph.hpp"
#include "support/oracles.hpp"

using namespace sth;

namespace {

SparseDocVector vec(std::vector<TermWeight> entries, DocId id = 0) { return {id, std::move(entries), Label{0}}; }

Eigen::MatrixXd dense(const SimilarityGraph& g) { return Eigen::MatrixXd(g.adjacency); }

}  // namespace

TEST(Cosine, Examples) {
  const auto a = vec({{0, 1.0}, {1, 2.0}});
  EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
  EXPECT_EQ(cosine(vec({{0, 1.0}}), vec({{1, 1.0}})), 0.0);
  // (1:1, 2:2) . (2:2, 3:1) = 4; both norms sqrt(5).
  EXPECT_NEAR(cosine(a, vec({{1, 2.0}, {2, 1.0}})), 0.8, 1e-15);
  EXPECT_THROW(cosine(a, vec({})), std::invalid_argument);
}

TEST(CosineScorer, BitIdenticalToPairwiseCosine) {
  Rng rng(1);
  const auto c = oracle::random_sparse_corpus(rng, 40, 25, 5);
  const CosineScorer scorer(c);
  std::vector<double> scores;
  for (std::size_t i = 0; i < c.size(); ++i) {
    scorer.score(c[i], scores);
    for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(scores[j], cosine(c[i], c[j]));
  }
}

TEST(KnnOf, Examples) {
  const Corpus two({vec({{0, 1.0}}, 0), vec({{0, 1.0}, {1, 1.0}}, 1)}, 2);
  const auto nb = knn_of(two, 0, 1);
  ASSERT_EQ(nb.size(), 1U);
  EXPECT_EQ(nb[0].index, 1U);

  // Equal similarities: lowest indices win.
  const Corpus same({vec({{0, 1.0}}, 0), vec({{0, 1.0}}, 1), vec({{0, 1.0}}, 2), vec({{0, 1.0}}, 3)}, 1);
  const auto tied = knn_of(same, 2, 2);
  EXPECT_EQ(tied[0].index, 0U);
  EXPECT_EQ(tied[1].index, 1U);

  EXPECT_THROW(knn_of(two, 2, 1), std::out_of_range);
  EXPECT_THROW(knn_of(two, 0, 2), std::invalid_argument);
}

TEST(KnnOf, MatchesExhaustiveSort) {
  Rng rng(2);
  const auto c = oracle::random_sparse_corpus(rng, 20, 15, 4);
  for (std::size_t q = 0; q < c.size(); ++q) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (j != q) all.emplace_back(-cosine(c[q], c[j]), j);
    std::sort(all.begin(), all.end());
    const auto got = knn_of(c, q, 5);
    for (std::size_t r = 0; r < 5; ++r) {
      EXPECT_EQ(got[r].index, all[r].second);
      EXPECT_EQ(got[r].similarity, -all[r].first);
    }
  }
}

TEST(BuildKnnGraph, ThreeSimilarDocsTopOne) {
  const Corpus c({vec({{0, 1.0}, {1, 0.1}}, 0), vec({{0, 1.0}, {1, 0.3}}, 1), vec({{0, 1.0}, {1, 1.0}}, 2)}, 2);
  const auto g = build_knn_graph(c, 1);
  const Eigen::MatrixXd expected = oracle::brute_force_adjacency(c, 1);
  EXPECT_EQ(dense(g), expected);
  EXPECT_EQ(dense(g), dense(g).transpose());
  EXPECT_GT(g.adjacency.coeff(0, 1), 0.0);
  EXPECT_GT(g.adjacency.coeff(1, 2), 0.0);
}

// A document that is every other document's nearest neighbour keeps all of
// those edges, so a single row may hold far more than 2k entries.
TEST(BuildKnnGraph, HubRowExceedsTwiceK) {
  std::vector<SparseDocVector> docs{vec({{0, 1.0}}, 0)};
  for (int i = 1; i <= 6; ++i) docs.push_back(vec({{0, 1.0}, {i, 1.0}}, i));
  const auto g = build_knn_graph(Corpus(std::move(docs), 7), 1);
  EXPECT_EQ((dense(g).row(0).array() != 0.0).count(), 6);
  EXPECT_LE(static_cast<std::size_t>(g.adjacency.nonZeros()), 2 * 1 * 7U);
}

TEST(BuildKnnGraph, MatchesBruteForceOnRandomCorpora) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(96);
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(8, n - 1));
    const auto c = oracle::random_sparse_corpus(rng, n, 30, 2 + rng.uniform_index(6));
    const auto g = build_knn_graph(c, k);
    const Eigen::MatrixXd w = dense(g);
    EXPECT_EQ(w, oracle::brute_force_adjacency(c, k)) << "n=" << n << " k=" << k;
    EXPECT_EQ(w, w.transpose());
    EXPECT_EQ(w.diagonal().cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      EXPECT_NEAR(g.degrees(i), w.row(i).sum(), 1e-12);
      EXPECT_GE(g.degrees(i), 0.0);
    }
    EXPECT_LE(static_cast<std::size_t>(g.adjacency.nonZeros()), 2 * k * n);
  }
}

TEST(BuildKnnGraph, OrthogonalDocumentsGiveEmptyGraph) {
  std::vector<SparseDocVector> docs;
  for (int i = 0; i < 5; ++i) docs.push_back(vec({{i, 1.0}}, i));
  std::vector<std::string> warnings;
  auto previous = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  const auto g = build_knn_graph(Corpus(docs, 5), 2);
  set_warning_sink(previous);
  EXPECT_EQ(g.adjacency.nonZeros(), 0);
  EXPECT_EQ(g.degrees.sum(), 0.0);
  EXPECT_EQ(g.isolated_nodes().size(), 5U);
  EXPECT_FALSE(warnings.empty());
}

TEST(BuildKnnGraph, DuplicatesAreMutualNeighbours) {
  const Corpus c({vec({{0, 1.0}, {2, 2.0}}, 0), vec({{1, 1.0}}, 1), vec({{0, 1.0}, {2, 2.0}}, 2)}, 3);
  const auto g = build_knn_graph(c, 1);
  EXPECT_DOUBLE_EQ(g.adjacency.coeff(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(g.adjacency.coeff(2, 0), 1.0);
}

TEST(BuildKnnGraph, Errors) {
  const Corpus c({vec({{0, 1.0}}, 0), vec({{0, 1.0}}, 1)}, 1);
  EXPECT_THROW(build_knn_graph(c, 2), std::invalid_argument);
  EXPECT_THROW(build_knn_graph(c, 0), std::invalid_argument);
  const Corpus zero({vec({{0, 1.0}}, 0), vec({}, 7), vec({{0, 2.0}}, 2)}, 1);
  try {
    build_knn_graph(zero, 1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
}

TEST(BuildKnnGraph, ThreadCountDoesNotChangeResult) {
  Rng rng(9);
  const auto c = oracle::random_sparse_corpus(rng, 80, 40, 6);
  EXPECT_EQ(dense(build_knn_graph(c, 4, 1)), dense(build_knn_graph(c, 4, 4)));
}

TEST(GraphFile, RoundTrip) {
  Rng rng(4);
  const auto c = oracle::random_sparse_corpus(rng, 30, 20, 4);
  const auto g = build_knn_graph(c, 3);
  std::stringstream buffer;
  write_graph(g, buffer);
  const auto text = buffer.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "30 3");
  const auto back = read_graph(buffer);
  EXPECT_EQ(back.k, 3U);
  EXPECT_EQ(dense(back), dense(g));
  std::istringstream bad("3 1\n2 1 0.5\n");
  EXPECT_THROW(read_graph(bad), ParseError);
}
