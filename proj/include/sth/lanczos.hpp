#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sth/common.hpp"
#include "sth/rng.hpp"

namespace sth {

struct LanczosOptions {
  double tolerance = 1e-9;        // on ||A u - theta u|| for unit Ritz vectors
  std::size_t max_iterations = 0;  // 0: the full Krylov dimension
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct LanczosResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;  // descending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  std::vector<double> residuals;
  std::size_t iterations = 0;
};

/// Largest `count` eigenpairs of a symmetric operator restricted to the
/// orthogonal complement of the unit vector `deflate` (pass an empty vector to
/// search the whole space). Lanczos with full reorthogonalisation: every new
/// basis vector is orthogonalised twice against all previous ones.
///
/// `apply(x, y)` must compute y = A x.
template <typename Scalar, typename Apply>
LanczosResult<Scalar> lanczos_largest(const Apply& apply, Eigen::Index n, Eigen::Index count,
                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& deflate,
                                      const LanczosOptions& options = {}) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const bool deflating = deflate.size() == n;
  const Eigen::Index dimension = n - (deflating ? 1 : 0);
  if (count < 1 || count > dimension) throw std::invalid_argument("lanczos: invalid eigenpair count");
  Eigen::Index max_steps = dimension;
  if (options.max_iterations > 0)
    max_steps = std::min<Eigen::Index>(dimension, static_cast<Eigen::Index>(options.max_iterations));
  max_steps = std::max(max_steps, count);

  Matrix basis(n, max_steps);
  std::vector<Scalar> alpha;
  std::vector<Scalar> beta;  // beta[j] couples basis j and j+1
  Rng rng(options.seed);

  auto orthogonalise = [&](Vector& w, Eigen::Index columns) {
    for (int pass = 0; pass < 2; ++pass) {
      if (columns > 0) w.noalias() -= basis.leftCols(columns) * (basis.leftCols(columns).transpose() * w);
      if (deflating) w -= deflate * deflate.dot(w);
    }
  };
  auto fresh_direction = [&](Eigen::Index columns) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector q(n);
      for (Eigen::Index i = 0; i < n; ++i) q(i) = static_cast<Scalar>(rng.normal());
      orthogonalise(q, columns);
      const Scalar norm = q.norm();
      if (norm > Scalar(1e-8)) return Vector(q / norm);
    }
    throw ConvergenceError("lanczos: could not extend the Krylov basis");
  };

  LanczosResult<Scalar> result;
  Vector q = fresh_direction(0);
  Vector w(n);
  Eigen::Index next_check = std::max<Eigen::Index>(count, 10);
  const Scalar breakdown = Scalar(1e-12);

  for (Eigen::Index j = 0; j < max_steps; ++j) {
    basis.col(j) = q;
    apply(q, w);
    const Scalar a = q.dot(w);
    alpha.push_back(a);
    orthogonalise(w, j + 1);
    Scalar b = w.norm();

    const Eigen::Index m = j + 1;
    const bool exhausted = m == max_steps;
    if (m >= count && (m >= next_check || exhausted || b < breakdown)) {
      Vector diag = Eigen::Map<const Vector>(alpha.data(), m);
      Vector sub = m > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), m - 1)) : Vector(0);
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      // Ascending eigenvalues: the largest `count` are the trailing columns.
      bool converged = true;
      std::vector<double> residuals;
      for (Eigen::Index r = 0; r < count; ++r) {
        const Eigen::Index c = m - 1 - r;
        const double res = std::abs(static_cast<double>(b * tri.eigenvectors()(m - 1, c)));
        residuals.push_back(res);
        converged = converged && res <= options.tolerance;
      }
      if (converged || (exhausted && m == dimension)) {
        result.values.resize(count);
        result.vectors.resize(n, count);
        for (Eigen::Index r = 0; r < count; ++r) {
          const Eigen::Index c = m - 1 - r;
          result.values(r) = tri.eigenvalues()(c);
          result.vectors.col(r) = basis.leftCols(m) * tri.eigenvectors().col(c);
          result.vectors.col(r).normalize();
        }
        result.residuals = residuals;
        result.iterations = static_cast<std::size_t>(m);
        return result;
      }
      if (exhausted) {
        std::string msg = "lanczos did not converge in " + std::to_string(m) + " iterations; residuals:";
        for (double r : residuals) msg += ' ' + std::to_string(r);
        throw ConvergenceError(msg);
      }
      next_check = m + std::max<Eigen::Index>(10, m / 5);
    }

    if (b < breakdown) {
      // Invariant subspace reached: restart in a fresh orthogonal direction.
      q = fresh_direction(m);
      b = Scalar(0);
    } else {
      q = w / b;
    }
    beta.push_back(b);
  }
  throw ConvergenceError("lanczos: iteration limit reached");
}

}  // namespace sth
