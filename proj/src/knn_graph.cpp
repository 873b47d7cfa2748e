#include "sth/knn_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace sth {

double cosine(const SparseDocVector& a, const SparseDocVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine of a zero-norm vector is undefined");
  return sparse_dot(a, b) / (na * nb);
}

CosineScorer::CosineScorer(const Corpus& corpus)
    : postings_(static_cast<std::size_t>(corpus.vocab_size())), norms_(corpus.size()) {
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    norms_[j] = corpus[j].norm();
    for (const auto& e : corpus[j].entries) postings_[static_cast<std::size_t>(e.index)].push_back({j, e.weight});
  }
}

void CosineScorer::score(const SparseDocVector& query, std::vector<double>& scores) const {
  const double qn = query.norm();
  if (qn == 0.0) throw std::invalid_argument("query document " + std::to_string(query.doc_id) + " has zero norm");
  scores.assign(norms_.size(), 0.0);
  for (const auto& e : query.entries) {
    if (static_cast<std::size_t>(e.index) >= postings_.size()) continue;
    for (const auto& p : postings_[static_cast<std::size_t>(e.index)]) scores[p.doc] += e.weight * p.weight;
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (norms_[j] == 0.0)
      throw std::invalid_argument("corpus document at position " + std::to_string(j) + " has zero norm");
    scores[j] = scores[j] / (qn * norms_[j]);
  }
}

std::vector<Neighbour> CosineScorer::top_k(const SparseDocVector& query, std::size_t k, std::size_t exclude) const {
  std::vector<double> scores;
  score(query, scores);
  return select_top_k(scores, k, exclude);
}

std::vector<Neighbour> select_top_k(const std::vector<double>& scores, std::size_t k, std::size_t exclude) {
  std::vector<Neighbour> candidates;
  candidates.reserve(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (j != exclude) candidates.push_back({j, scores[j]});
  k = std::min(k, candidates.size());
  auto better = [](const Neighbour& a, const Neighbour& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.index < b.index);
  };
  std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(), better);
  candidates.resize(k);
  std::sort(candidates.begin(), candidates.end(), better);
  return candidates;
}

std::vector<Neighbour> knn_of(const Corpus& corpus, std::size_t query_index, std::size_t k) {
  if (query_index >= corpus.size()) throw std::out_of_range("query index " + std::to_string(query_index) + " out of range");
  if (k >= corpus.size()) throw std::invalid_argument("k must be smaller than the corpus size");
  std::vector<double> scores(corpus.size());
  const auto& q = corpus[query_index];
  for (std::size_t j = 0; j < corpus.size(); ++j) scores[j] = j == query_index ? 0.0 : cosine(q, corpus[j]);
  return select_top_k(scores, k, query_index);
}

std::vector<std::size_t> SimilarityGraph::isolated_nodes() const {
  std::vector<std::size_t> out;
  for (Eigen::Index c = 0; c < adjacency.outerSize(); ++c) {
    bool any = false;
    for (Eigen::SparseMatrix<double>::InnerIterator it(adjacency, c); it; ++it) any = any || it.value() != 0.0;
    if (!any) out.push_back(static_cast<std::size_t>(c));
  }
  return out;
}

SimilarityGraph graph_from_edges(std::size_t n, std::size_t k, const std::vector<WeightedEdge>& edges) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges.size());
  for (const auto& e : edges) {
    if (e.i == e.j || e.i >= n || e.j >= n) throw std::invalid_argument("invalid edge");
    triplets.emplace_back(static_cast<int>(e.i), static_cast<int>(e.j), e.weight);
    triplets.emplace_back(static_cast<int>(e.j), static_cast<int>(e.i), e.weight);
  }
  SimilarityGraph g;
  g.n = n;
  g.k = k;
  g.adjacency.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Duplicate pairs would be summed; callers pass each pair once.
  g.adjacency.setFromTriplets(triplets.begin(), triplets.end());
  g.adjacency.makeCompressed();
  g.degrees = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < g.adjacency.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(g.adjacency, c); it; ++it) g.degrees(it.row()) += it.value();
  return g;
}

SimilarityGraph build_knn_graph(const Corpus& corpus, std::size_t k, unsigned threads) {
  const std::size_t n = corpus.size();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k >= n) throw std::invalid_argument("k = " + std::to_string(k) + " must be smaller than n = " + std::to_string(n));
  for (const auto& doc : corpus.docs())
    if (doc.squared_norm() == 0.0) throw std::invalid_argument("document " + std::to_string(doc.doc_id) + " has zero norm");

  const CosineScorer scorer(corpus);
  std::vector<std::vector<Neighbour>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> scores;
    scorer.score(corpus[i], scores);
    rows[i] = select_top_k(scores, k, i);
  });

  // OR-symmetrisation: keep each unordered pair once.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& nb : rows[i]) pairs.emplace_back(std::min(i, nb.index), std::max(i, nb.index));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<WeightedEdge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double w = cosine(corpus[i], corpus[j]);
    if (w != 0.0) edges.push_back({i, j, w});
  }
  auto graph = graph_from_edges(n, k, edges);
  if (const auto isolated = graph.isolated_nodes(); !isolated.empty())
    warn(std::to_string(isolated.size()) + " node(s) have no nonzero similarity to any neighbour (first: doc " +
         std::to_string(corpus[isolated.front()].doc_id) + ")");
  return graph;
}

void write_graph(const SimilarityGraph& graph, std::ostream& out) {
  out << graph.n << ' ' << graph.k << '\n';
  // Column-major storage of a symmetric matrix: column j, rows i < j gives (i, j)
  // ordered by j; collect and sort by (i, j).
  std::vector<WeightedEdge> edges;
  for (Eigen::Index c = 0; c < graph.adjacency.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(graph.adjacency, c); it; ++it)
      if (it.row() < it.col())
        edges.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
  std::sort(edges.begin(), edges.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  char buf[64];
  for (const auto& e : edges) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.weight);
    out << e.i << ' ' << e.j << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

SimilarityGraph read_graph(std::istream& in) {
  std::size_t n = 0;
  std::size_t k = 0;
  if (!(in >> n >> k)) throw ParseError("missing graph header 'n k'", 1);
  std::vector<WeightedEdge> edges;
  std::string wtoken;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t line = 1;
  while (in >> i >> j >> wtoken) {
    ++line;
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(wtoken.data(), wtoken.data() + wtoken.size(), w);
    if (ec != std::errc() || ptr != wtoken.data() + wtoken.size()) throw ParseError("malformed edge weight", line);
    if (i >= j || j >= n) throw ParseError("edge must satisfy i < j < n", line);
    edges.push_back({i, j, w});
  }
  if (!in.eof()) throw ParseError("malformed edge line", line + 1);
  return graph_from_edges(n, k, edges);
}

}  // namespace sth
