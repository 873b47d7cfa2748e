#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>

#include "sth/common.hpp"
#include "sth/hashcodes.hpp"
#include "sth/knn_graph.hpp"
#include "sth/lanczos.hpp"

namespace sth {

struct SolverStats {
  std::string method;               // "dense" or "lanczos"
  std::size_t iterations = 0;       // Lanczos steps; 0 for the dense solver
  std::vector<double> residuals;    // ||N u - lambda u|| per returned pair
  std::size_t extra_null_vectors = 0;  // near-zero pairs beyond the trivial one
};

/// Laplacian eigenmap of a similarity graph. Column p holds the generalised
/// eigenvector v_p of L v = lambda D v; columns are D-orthonormal and
/// D-orthogonal to the constant vector.
template <typename Scalar = double>
struct Embedding {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coords;  // n x l
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;          // ascending
  SolverStats stats;

  Eigen::Index rows() const { return coords.rows(); }
  Eigen::Index dimensions() const { return coords.cols(); }
};

enum class EigenSolverKind { automatic, dense, lanczos };

struct SpectralOptions {
  EigenSolverKind solver = EigenSolverKind::automatic;
  std::size_t dense_limit = 500;  // automatic: dense when n <= dense_limit
  double null_tolerance = 1e-8;   // eigenvalues below this count as zero
  LanczosOptions lanczos;
};

/// L = D - W.
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> laplacian(const SimilarityGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.n);
  Eigen::SparseMatrix<Scalar> l = -graph.adjacency.cast<Scalar>();
  Eigen::SparseMatrix<Scalar> d(n, n);
  std::vector<Eigen::Triplet<Scalar>> diag;
  diag.reserve(graph.n);
  for (Eigen::Index i = 0; i < n; ++i) diag.emplace_back(i, i, static_cast<Scalar>(graph.degrees(i)));
  d.setFromTriplets(diag.begin(), diag.end());
  l += d;
  l.makeCompressed();
  return l;
}

namespace detail {

// Sign and ordering conventions shared by both solver paths. `u` holds
// normalised-Laplacian eigenvectors, `mu` their eigenvalues (ascending up to
// rounding); the first `l` generalised eigenvectors are returned.
template <typename Scalar>
void canonicalise(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& inv_sqrt_degree,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mu, Eigen::Index l, Embedding<Scalar>& out) {
  const Eigen::Index count = u.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v = inv_sqrt_degree.asDiagonal() * u;

  std::vector<Eigen::Index> peak(static_cast<std::size_t>(count));
  for (Eigen::Index c = 0; c < count; ++c) {
    // First index whose magnitude equals the maximum up to rounding.
    const Scalar top = v.col(c).cwiseAbs().maxCoeff();
    const Scalar tie = top * (Scalar(1) - std::sqrt(Eigen::NumTraits<Scalar>::epsilon()));
    Eigen::Index arg = 0;
    while (std::abs(v(arg, c)) < tie) ++arg;
    peak[static_cast<std::size_t>(c)] = arg;
    if (v(arg, c) < Scalar(0)) v.col(c) = -v.col(c);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mu(a) < mu(b); });
  // Within a degenerate cluster, order by position of the largest-magnitude entry.
  const double degenerate = 1e-9;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           std::abs(static_cast<double>(mu(order[end]) - mu(order[start]))) <= degenerate)
      ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return peak[static_cast<std::size_t>(a)] < peak[static_cast<std::size_t>(b)];
                     });
    start = end;
  }

  out.coords.resize(v.rows(), l);
  out.eigenvalues.resize(l);
  for (Eigen::Index p = 0; p < l; ++p) {
    out.coords.col(p) = v.col(order[static_cast<std::size_t>(p)]);
    out.eigenvalues(p) = mu(order[static_cast<std::size_t>(p)]);
  }
}

}  // namespace detail

/// Solves L v = lambda D v for the l smallest eigenvalues, skipping the
/// trivial pair (lambda = 0, v constant). Requires every degree > 0 and
/// l < n - 1. The dense path diagonalises D^-1/2 L D^-1/2; the Lanczos path
/// finds the largest eigenvalues of D^-1/2 W D^-1/2 on the complement of
/// D^1/2 1. Extra zero eigenvalues (a disconnected graph) are kept and
/// reported via warn().
template <typename Scalar = double>
Embedding<Scalar> solve_lapeig(const SimilarityGraph& graph, std::size_t l, const SpectralOptions& options = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(graph.n);
  const auto dims = static_cast<Eigen::Index>(l);
  if (l < 1) throw std::invalid_argument("embedding dimension must be at least 1");
  if (dims >= n - 1)
    throw std::invalid_argument("embedding dimension l = " + std::to_string(l) + " must be < n - 1 = " +
                                std::to_string(n - 1));
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(graph.degrees(i) > 0.0))
      throw std::invalid_argument("node " + std::to_string(i) + " has zero degree; the generalised problem is singular");

  const Vector degree = graph.degrees.cast<Scalar>();
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Vector trivial = degree.cwiseSqrt().normalized();
  const Eigen::SparseMatrix<Scalar> scaled =
      inv_sqrt.asDiagonal() * graph.adjacency.cast<Scalar>() * inv_sqrt.asDiagonal();

  const Scalar null_tolerance =
      std::max(static_cast<Scalar>(options.null_tolerance), Scalar(256) * Eigen::NumTraits<Scalar>::epsilon());
  auto kind = options.solver;
  if (kind == EigenSolverKind::automatic)
    kind = graph.n <= options.dense_limit ? EigenSolverKind::dense : EigenSolverKind::lanczos;

  Embedding<Scalar> out;
  Matrix u;
  Vector mu;
  if (kind == EigenSolverKind::dense) {
    out.stats.method = "dense";
    const Matrix normalised = Matrix::Identity(n, n) - Matrix(scaled);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(normalised);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    const Vector& vals = solver.eigenvalues();
    const Matrix& vecs = solver.eigenvectors();

    Eigen::Index nulls = 0;
    while (nulls < n && vals(nulls) < null_tolerance) ++nulls;
    if (nulls == 0) throw ConvergenceError("trivial eigenvalue 0 not found");
    const Matrix null_basis = vecs.leftCols(nulls);
    const Vector overlap = null_basis.transpose() * trivial;
    if (overlap.norm() <= Scalar(0.99)) throw ConvergenceError("trivial eigenvector not found in the null space");

    // Orthonormal complement of the trivial direction inside the null space.
    Eigen::HouseholderQR<Matrix> qr(Matrix(overlap / overlap.norm()));
    const Matrix rotation = qr.householderQ() * Matrix::Identity(nulls, nulls);
    const Matrix kept_null = null_basis * rotation.rightCols(nulls - 1);

    const Eigen::Index kept = std::min<Eigen::Index>(n - 1, dims + nulls + 8);
    u.resize(n, kept);
    mu.resize(kept);
    for (Eigen::Index c = 0; c < nulls - 1; ++c) {
      u.col(c) = kept_null.col(c);
      mu(c) = kept_null.col(c).dot(normalised * kept_null.col(c));
    }
    for (Eigen::Index c = nulls - 1; c < kept; ++c) {
      u.col(c) = vecs.col(c + 1);
      mu(c) = vals(c + 1);
    }
    out.stats.extra_null_vectors = static_cast<std::size_t>(nulls - 1);
  } else {
    out.stats.method = "lanczos";
    auto apply = [&](const Vector& x, Vector& y) { y.noalias() = scaled * x; };
    const auto solved = lanczos_largest<Scalar>(apply, n, dims, trivial, options.lanczos);
    u = solved.vectors;
    mu = Vector::Ones(dims) - solved.values;
    out.stats.iterations = solved.iterations;
    for (Eigen::Index c = 0; c < dims; ++c)
      if (mu(c) < null_tolerance) ++out.stats.extra_null_vectors;
  }
  if (out.stats.extra_null_vectors > 0)
    warn("similarity graph is disconnected: " + std::to_string(out.stats.extra_null_vectors) +
         " extra zero eigenvalue(s) kept as component indicators");

  detail::canonicalise<Scalar>(inv_sqrt, u, mu, dims, out);

  const Eigen::SparseMatrix<Scalar> lap = laplacian<Scalar>(graph);
  out.stats.residuals.clear();
  for (Eigen::Index p = 0; p < dims; ++p) {
    // Residual of the normalised problem for the unit vector D^1/2 v.
    const Vector v = out.coords.col(p);
    const Vector r = inv_sqrt.asDiagonal() * (lap * v) - out.eigenvalues(p) * degree.cwiseSqrt().cwiseProduct(v);
    out.stats.residuals.push_back(static_cast<double>(r.norm()));
  }
  return out;
}

/// (1/4) sum_i sum_j W_ij ||y_i - y_j||^2 over +-1 codes, by explicit summation
/// over the stored entries of W.
inline double weighted_hamming_objective(const CodeMatrix& codes, const SimilarityGraph& graph) {
  if (codes.size() != graph.n)
    throw std::invalid_argument("code matrix has " + std::to_string(codes.size()) + " rows but the graph has " +
                                std::to_string(graph.n) + " nodes");
  double total = 0.0;
  for (Eigen::Index c = 0; c < graph.adjacency.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(graph.adjacency, c); it; ++it) {
      const auto yi = codes.code(static_cast<std::size_t>(it.row()));
      const auto yj = codes.code(static_cast<std::size_t>(it.col()));
      double squared = 0.0;
      for (int p = 0; p < codes.length; ++p) {
        const double diff = yi.sign(p) - yj.sign(p);
        squared += diff * diff;
      }
      total += it.value() * squared;
    }
  }
  return total / 4.0;
}

struct BinarizationThresholds {
  std::vector<double> values;  // one per dimension
};

struct BinarizedCodes {
  CodeMatrix codes;
  BinarizationThresholds thresholds;
};

/// Lower median of a column: the sorted value at index floor((n - 1) / 2).
template <typename Derived>
double lower_median(const Eigen::MatrixBase<Derived>& column) {
  std::vector<double> values(static_cast<std::size_t>(column.size()));
  for (Eigen::Index i = 0; i < column.size(); ++i) values[static_cast<std::size_t>(i)] = static_cast<double>(column(i));
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

/// Bit (i, p) is on iff coords(i, p) is strictly above column p's lower median.
template <typename Derived>
BinarizedCodes median_binarize(const Eigen::MatrixBase<Derived>& coords) {
  if (coords.rows() == 0 || coords.cols() == 0) throw std::invalid_argument("cannot binarize an empty embedding");
  if (coords.cols() > kMaxCodeLength) throw std::invalid_argument("at most 64 dimensions can be binarized");
  BinarizedCodes out;
  out.codes.length = static_cast<int>(coords.cols());
  out.codes.rows.assign(static_cast<std::size_t>(coords.rows()), 0);
  for (Eigen::Index p = 0; p < coords.cols(); ++p) {
    const double threshold = lower_median(coords.col(p));
    out.thresholds.values.push_back(threshold);
    std::size_t on = 0;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
      if (static_cast<double>(coords(i, p)) > threshold) {
        out.codes.rows[static_cast<std::size_t>(i)] |= std::uint64_t{1} << p;
        ++on;
      }
    }
    if (on == 0) warn("embedding dimension " + std::to_string(p) + " is constant; its bit is off everywhere");
  }
  return out;
}

template <typename Scalar>
BinarizedCodes median_binarize(const Embedding<Scalar>& embedding) {
  return median_binarize(embedding.coords);
}

}  // namespace sth
