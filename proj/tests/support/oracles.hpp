#pragma once

// Independent reference computations used only by the test suites.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "sth/corpus.hpp"
#include "sth/knn_graph.hpp"
#include "sth/rng.hpp"

namespace sth::oracle {

/// Full n x n cosine matrix, then W by the literal OR rule with top-k lists
/// taken from a complete sort (similarity desc, index asc).
inline Eigen::MatrixXd brute_force_adjacency(const Corpus& corpus, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(corpus.size());
  Eigen::MatrixXd cos(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cos(i, j) = cosine(corpus[static_cast<std::size_t>(i)], corpus[static_cast<std::size_t>(j)]);
  Eigen::MatrixXi in_knn = Eigen::MatrixXi::Zero(n, n);  // in_knn(i, j): j is among i's neighbours
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> others;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::sort(others.begin(), others.end(), [&](Eigen::Index a, Eigen::Index b) {
      return cos(i, a) > cos(i, b) || (cos(i, a) == cos(i, b) && a < b);
    });
    for (std::size_t r = 0; r < k; ++r) in_knn(i, others[r]) = 1;
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && (in_knn(i, j) || in_knn(j, i))) w(i, j) = cos(i, j);
  return w;
}

inline bool connected(const Eigen::MatrixXd& w) {
  const auto n = w.rows();
  if (n == 0) return true;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Eigen::Index count = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop();
    for (Eigen::Index j = 0; j < n; ++j)
      if (w(i, j) != 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        ++count;
        frontier.push(j);
      }
  }
  return count == n;
}

/// All generalised eigenvalues of L v = lambda D v, ascending, by Eigen's
/// Cholesky-based generalised solver on the dense matrices.
struct DenseGeneralized {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // D-orthonormal columns
};

inline DenseGeneralized dense_generalized(const Eigen::MatrixXd& w) {
  const Eigen::VectorXd d = w.rowwise().sum();
  const Eigen::MatrixXd dm = d.asDiagonal();
  const Eigen::MatrixXd l = dm - w;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, dm);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Random corpus of strictly positive dense vectors: every cosine is positive.
inline Corpus random_positive_corpus(Rng& rng, std::size_t n, std::int32_t m) {
  std::vector<SparseDocVector> docs;
  for (std::size_t i = 0; i < n; ++i) {
    SparseDocVector d;
    d.doc_id = static_cast<DocId>(i);
    d.label = static_cast<Label>(rng.uniform_index(3));
    for (std::int32_t t = 0; t < m; ++t) d.entries.push_back({t, 0.01 + rng.uniform01()});
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs), m);
}

/// Random sparse corpus; each document has `nnz` distinct terms with positive weights.
inline Corpus random_sparse_corpus(Rng& rng, std::size_t n, std::int32_t m, std::size_t nnz) {
  std::vector<SparseDocVector> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int32_t> terms(static_cast<std::size_t>(m));
    std::iota(terms.begin(), terms.end(), 0);
    rng.shuffle(std::span<std::int32_t>(terms));
    terms.resize(std::min<std::size_t>(nnz, terms.size()));
    std::sort(terms.begin(), terms.end());
    SparseDocVector d;
    d.doc_id = static_cast<DocId>(i);
    d.label = static_cast<Label>(rng.uniform_index(4));
    for (auto t : terms) d.entries.push_back({t, 0.1 + rng.uniform01()});
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs), m);
}

/// Random connected weighted graph: a random spanning tree plus extra edges.
inline std::vector<WeightedEdge> random_connected_edges(Rng& rng, std::size_t n, std::size_t extra) {
  std::vector<WeightedEdge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  auto add = [&](std::size_t i, std::size_t j) {
    if (i == j || used[i][j]) return;
    used[i][j] = used[j][i] = true;
    edges.push_back({std::min(i, j), std::max(i, j), 0.05 + rng.uniform01()});
  };
  for (std::size_t i = 1; i < n; ++i) add(i, rng.uniform_index(i));
  for (std::size_t e = 0; e < extra; ++e) add(rng.uniform_index(n), rng.uniform_index(n));
  return edges;
}

/// Exact optimum of min_w 1/2|w|^2 + (C/n) sum max(0, 1 - y_i w.x_i) for tiny
/// problems: every candidate optimum is characterised by the set A of points
/// on the margin (|A| <= m) and the set V of margin violators; for each
/// assignment the stationary w is solved in closed form, and the smallest
/// objective over all candidates is returned.
inline double svm_enumeration_optimum(const Eigen::MatrixXd& x, const std::vector<int>& y, double c) {
  const auto n = x.rows();
  const auto m = x.cols();
  const double upper = c / static_cast<double>(n);
  auto objective = [&](const Eigen::VectorXd& w) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * x.row(i).dot(w));
    return 0.5 * w.squaredNorm() + upper * loss;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 other, 1 margin, 2 violator
  while (true) {
    Eigen::Index active = 0;
    for (int s : state) active += s == 1 ? 1 : 0;
    if (active <= m) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
      Eigen::MatrixXd a(active, m);
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)];
        if (state[static_cast<std::size_t>(i)] == 2) g += upper * yi * x.row(i).transpose();
        if (state[static_cast<std::size_t>(i)] == 1) a.row(r++) = yi * x.row(i);
      }
      Eigen::VectorXd w = g;
      if (active > 0) {
        const Eigen::MatrixXd gram = a * a.transpose();
        const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(active) - a * g;
        const Eigen::VectorXd mu = gram.completeOrthogonalDecomposition().solve(rhs);
        w += a.transpose() * mu;
      }
      best = std::min(best, objective(w));
    }
    std::size_t pos = 0;
    while (pos < state.size() && state[pos] == 2) state[pos++] = 0;
    if (pos == state.size()) break;
    ++state[pos];
  }
  return best;
}

}  // namespace sth::oracle
