#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sth/corpus.hpp"

namespace sth {

/// x.y / (|x| |y|). Throws std::invalid_argument on a zero-norm input.
double cosine(const SparseDocVector& a, const SparseDocVector& b);

struct Neighbour {
  std::size_t index;  // position in the searched corpus
  double similarity;

  friend bool operator==(const Neighbour&, const Neighbour&) = default;
};

/// Cosine scores of arbitrary query vectors against every document of a fixed
/// corpus, via an inverted index. Each score is bit-identical to
/// cosine(query, doc): products are accumulated in ascending term order.
class CosineScorer {
 public:
  explicit CosineScorer(const Corpus& corpus);

  /// Fills scores[j] = cosine(query, corpus[j]); query must have positive norm.
  void score(const SparseDocVector& query, std::vector<double>& scores) const;

  /// Top-k by descending score, ties by ascending index; `exclude` is skipped.
  std::vector<Neighbour> top_k(const SparseDocVector& query, std::size_t k,
                               std::size_t exclude = static_cast<std::size_t>(-1)) const;

  std::size_t size() const { return norms_.size(); }

 private:
  struct Posting {
    std::size_t doc;
    double weight;
  };
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> norms_;
};

/// Selects the k best (score desc, index asc) among all indices but `exclude`.
std::vector<Neighbour> select_top_k(const std::vector<double>& scores, std::size_t k,
                                    std::size_t exclude = static_cast<std::size_t>(-1));

/// Exact top-k cosine neighbours of corpus[query_index] within the corpus,
/// excluding itself; ties broken by ascending index.
std::vector<Neighbour> knn_of(const Corpus& corpus, std::size_t query_index, std::size_t k);

/// Symmetric k-NN similarity graph: W_ij = cos(x_i, x_j) when either node is
/// among the other's k nearest neighbours, else 0. No self loops.
struct SimilarityGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  Eigen::SparseMatrix<double> adjacency;  // column-major, both triangles stored
  Eigen::VectorXd degrees;                // row sums of adjacency

  /// Nodes whose whole row is zero.
  std::vector<std::size_t> isolated_nodes() const;
};

SimilarityGraph build_knn_graph(const Corpus& corpus, std::size_t k, unsigned threads = 1);

/// Graph from an explicit symmetric edge list (i != j, each pair once).
struct WeightedEdge {
  std::size_t i;
  std::size_t j;
  double weight;
};
SimilarityGraph graph_from_edges(std::size_t n, std::size_t k, const std::vector<WeightedEdge>& edges);

// Coordinate-list text format: header "n k", then one "i j w" line per edge
// with 0-based i < j, ordered by (i, j).
void write_graph(const SimilarityGraph& graph, std::ostream& out);
SimilarityGraph read_graph(std::istream& in);

}  // namespace sth
