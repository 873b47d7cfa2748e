#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sth/corpus.hpp"
#include "sth/hashfn.hpp"
#include "sth/knn_graph.hpp"
#include "sth/spectral.hpp"

namespace sth {

struct PipelineConfig {
  std::size_t k = 25;   // graph neighbourhood size
  int bits = 16;        // code length, at most 64
  TrainConfig svm;      // svm.seed is replaced by the "svm" substream of `seed`
  SpectralOptions spectral;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// A stage of the training pipeline failed; what() names the stage.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageTimings {
  double graph_seconds = 0.0;
  double spectral_seconds = 0.0;
  double binarize_seconds = 0.0;
  double svm_seconds = 0.0;

  double total() const { return graph_seconds + spectral_seconds + binarize_seconds + svm_seconds; }
};

struct TrainedSth {
  Corpus corpus;                  // training documents actually used (zero-norm ones removed)
  std::vector<DocId> excluded;    // removed zero-norm documents
  SimilarityGraph graph;
  Embedding<double> embedding;
  BinarizedCodes binarized;       // self-taught codes of `corpus`
  HashModel model;
  std::vector<BitTrainingStats> bit_stats;
  StageTimings timings;
};

/// k-NN graph -> Laplacian eigenmap -> median thresholds -> one linear SVM per bit.
TrainedSth train_sth(const Corpus& train, const PipelineConfig& config);

/// Deterministic training summary: eigenvalues, solver stats, per-bit balance,
/// per-bit SVM diagnostics and the largest absolute pairwise bit correlation.
nlohmann::json training_diagnostics(const TrainedSth& trained, const PipelineConfig& config);

/// Pearson correlations between +-1 bit columns.
Eigen::MatrixXd bit_correlations(const CodeMatrix& codes);

/// 4, 8, 16, 32, 64 up to `bits`, plus `bits` itself.
std::vector<int> default_code_lengths(int bits);

// Embedding text file:
//   "sth-embedding 1" / "n l" / "eigenvalues ..." / "thresholds ..." / n rows of l values
void write_embedding(const Embedding<double>& embedding, const BinarizationThresholds& thresholds, std::ostream& out);
Embedding<double> read_embedding(std::istream& in, BinarizationThresholds* thresholds = nullptr);

}  // namespace sth
