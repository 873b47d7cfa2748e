#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sth/corpus.hpp"
#include "sth/hashcodes.hpp"

namespace sth {

struct TrainConfig {
  double c = 1.0;               // total slack weight; each sample carries C / n
  double tolerance = 1e-3;      // stop when max - min projected gradient <= tolerance
  int max_epochs = 1000;
  std::uint64_t seed = 0;       // per-epoch permutation stream
  bool shrinking = true;
};

/// Decision function sgn(w . x) for one bit; sgn(0) = -1.
struct LinearModel {
  Eigen::VectorXd weights;
  int bit_index = 0;

  double decision(const SparseDocVector& x) const { return x.dot(weights); }
  bool predict(const SparseDocVector& x) const { return decision(x) > 0.0; }
};

struct BitTrainingStats {
  int epochs = 0;
  bool converged = false;
  double primal = 0.0;
  double dual = 0.0;
  double relative_gap = 0.0;  // (primal - dual) / primal
  double accuracy = 0.0;      // training accuracy against the given labels
};

struct TrainedBit {
  LinearModel model;
  BitTrainingStats stats;
  Eigen::VectorXd dual;  // alpha_i in [0, C / n]
};

/// Called after every epoch with (epoch, primal objective, dual objective).
using EpochObserver = std::function<void(int, double, double)>;

/// Linear SVM without bias,
///   min_w 1/2 |w|^2 + (C / n) sum_i max(0, 1 - y_i w . x_i),
/// solved by dual coordinate descent with a random permutation per epoch and
/// shrinking. labels are +1 / -1.
TrainedBit train_bit(const Corpus& train, std::span<const int> labels, const TrainConfig& config,
                     int bit_index = 0, const EpochObserver& observer = {});

/// Primal and dual objective values for a weight vector / dual vector pair.
double svm_primal_objective(const Corpus& train, std::span<const int> labels, double c, const Eigen::VectorXd& w);
double svm_dual_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w);

/// One hyperplane per code bit, stored term-major: column t holds term t's
/// weight for every bit, so encoding touches one contiguous column per nonzero.
struct HashModel {
  Eigen::MatrixXd weights;  // l x m; row p is bit p's w
  TrainConfig config;

  int length() const { return static_cast<int>(weights.rows()); }
  std::int32_t vocab_size() const { return static_cast<std::int32_t>(weights.cols()); }
  LinearModel bit(int p) const { return {weights.row(p).transpose(), p}; }
};

/// Trains one classifier per code bit, independently (optionally in parallel).
HashModel train_all(const Corpus& train, const CodeMatrix& codes, const TrainConfig& config, unsigned threads = 1,
                    std::vector<BitTrainingStats>* stats = nullptr);

/// Bit p on iff w_p . x > 0. Throws std::out_of_range for term indices >= m.
BitCode predict_code(const HashModel& model, const SparseDocVector& x);
CodeMatrix predict_codes(const HashModel& model, const Corpus& docs);

// Binary model file, little-endian:
//   magic "STHMODEL", u32 version = 1, u32 l, u64 m, f64 C, f64 tolerance,
//   i32 max_epochs, u64 seed, then l x m f64 weights, bit-major.
void write_model(const HashModel& model, std::ostream& out);
HashModel read_model(std::istream& in);

}  // namespace sth
