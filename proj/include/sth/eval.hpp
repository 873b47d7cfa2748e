#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sth/corpus.hpp"
#include "sth/hashcodes.hpp"

namespace sth {

enum class TruthMethod { knn, same_topic };

/// Relevant training documents for each evaluated query.
struct GroundTruth {
  TruthMethod method = TruthMethod::knn;
  std::size_t k = 0;                          // knn only
  std::vector<std::size_t> queries;           // evaluated positions in the query corpus
  std::vector<std::vector<DocId>> relevant;   // sorted training doc ids, aligned with queries
  std::size_t skipped = 0;                    // queries left out (zero norm / unseen topic)
};

/// Exact cosine top-k training documents per query (ties by ascending training
/// position). Zero-norm queries are skipped with a warning.
GroundTruth ground_truth_knn(const Corpus& train, const Corpus& queries, std::size_t k, unsigned threads = 1);

/// Training documents sharing the query's label. Queries whose label never
/// occurs in training are skipped and counted.
GroundTruth ground_truth_topic(const Corpus& train, const Corpus& queries);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Set-based precision, recall and F1; each is 0 when its denominator is.
Prf prf(std::span<const DocId> retrieved, std::span<const DocId> relevant);

struct QueryScore {
  std::string method;
  int length = 0;
  int radius = 0;
  DocId query_id = 0;
  std::size_t retrieved = 0;
  std::size_t relevant = 0;
  Prf scores;
};

/// Macro averages: per-query P, R and F1, each averaged arithmetically.
struct SweepRow {
  std::string method;
  int length = 0;
  int radius = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_empty = 0;
};

struct EvalReport {
  std::vector<SweepRow> rows;
  std::vector<QueryScore> per_query;

  void append(const EvalReport& other);
  const SweepRow* find(const std::string& method, int length, int radius) const;
};

/// For every (length, radius): truncate both code sets to the first `length`
/// bits, index the training codes, retrieve each evaluated query's Hamming
/// ball and score it against the ground truth. query_codes is aligned with
/// the query corpus (query_ids).
EvalReport sweep(const std::string& method, const CodeMatrix& train_codes, std::span<const DocId> train_ids,
                 const CodeMatrix& query_codes, std::span<const DocId> query_ids, const GroundTruth& truth,
                 std::span<const int> lengths, std::span<const int> radii, unsigned threads = 1);

// TSV columns: method code_length radius mean_precision mean_recall mean_f1 n_queries n_empty
void write_report_tsv(const EvalReport& report, std::ostream& out);
// TSV columns: method code_length radius query_id n_retrieved n_relevant precision recall f1
void write_per_query_tsv(const EvalReport& report, std::ostream& out);
// Precision-recall curve points at a fixed radius, one per (method, code length).
void write_plot_data(const EvalReport& report, int radius, std::ostream& out);

}  // namespace sth
