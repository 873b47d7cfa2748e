#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Core>

#include "sth/corpus.hpp"
#include "sth/hashcodes.hpp"

namespace sth {

/// Sign random projection LSH: bit p = [r_p . x > 0] with r_p ~ N(0, I).
/// The projection matrix is regenerated bit-exactly from (seed, l, m): entries
/// are drawn row by row from Rng(Rng::substream(seed, "lsh")).normal().
struct LshModel {
  Eigen::MatrixXd projections;  // l x m
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(projections.rows()); }
  std::int32_t vocab_size() const { return static_cast<std::int32_t>(projections.cols()); }
};

LshModel lsh_train(std::int32_t vocab_size, int length, std::uint64_t seed);

/// All l projections r_p . x (any l).
Eigen::VectorXd lsh_project(const LshModel& model, const SparseDocVector& x);

/// Requires l <= 64. sgn(0) = -1, as for the learned hash functions.
BitCode lsh_code(const LshModel& model, const SparseDocVector& x);
CodeMatrix lsh_codes(const LshModel& model, const Corpus& docs);

// Text file: "sth-lsh 1" then "seed m l".
void write_lsh(const LshModel& model, std::ostream& out);
LshModel read_lsh(std::istream& in);

}  // namespace sth
