#include "sth/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <unordered_set>

#include "sth/common.hpp"
#include "sth/knn_graph.hpp"

namespace sth {

GroundTruth ground_truth_knn(const Corpus& train, const Corpus& queries, std::size_t k, unsigned threads) {
  if (train.empty()) throw std::invalid_argument("ground truth needs a nonempty training corpus");
  if (k < 1 || k >= train.size()) throw std::invalid_argument("k must lie in [1, train size)");
  GroundTruth truth;
  truth.method = TruthMethod::knn;
  truth.k = k;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (queries[q].squared_norm() == 0.0) {
      warn("query document " + std::to_string(queries[q].doc_id) + " has zero norm; skipped");
      ++truth.skipped;
    } else {
      truth.queries.push_back(q);
    }
  }
  const CosineScorer scorer(train);
  truth.relevant.resize(truth.queries.size());
  parallel_for(truth.queries.size(), threads, [&](std::size_t s) {
    auto& rel = truth.relevant[s];
    for (const auto& nb : scorer.top_k(queries[truth.queries[s]], k)) rel.push_back(train[nb.index].doc_id);
    std::sort(rel.begin(), rel.end());
  });
  return truth;
}

GroundTruth ground_truth_topic(const Corpus& train, const Corpus& queries) {
  GroundTruth truth;
  truth.method = TruthMethod::same_topic;
  std::map<Label, std::vector<DocId>> by_label;
  for (const auto& d : train.docs()) {
    if (!d.label) throw std::invalid_argument("training document " + std::to_string(d.doc_id) + " has no label");
    by_label[*d.label].push_back(d.doc_id);
  }
  for (auto& [label, ids] : by_label) std::sort(ids.begin(), ids.end());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& d = queries[q];
    if (!d.label) throw std::invalid_argument("query document " + std::to_string(d.doc_id) + " has no label");
    auto it = by_label.find(*d.label);
    if (it == by_label.end()) {
      ++truth.skipped;
      continue;
    }
    truth.queries.push_back(q);
    truth.relevant.push_back(it->second);
  }
  return truth;
}

Prf prf(std::span<const DocId> retrieved, std::span<const DocId> relevant) {
  const std::unordered_set<DocId> rel(relevant.begin(), relevant.end());
  const std::unordered_set<DocId> ret(retrieved.begin(), retrieved.end());
  std::size_t hits = 0;
  for (DocId id : ret) hits += rel.contains(id) ? 1 : 0;
  Prf out;
  if (!ret.empty()) out.precision = static_cast<double>(hits) / static_cast<double>(ret.size());
  if (!rel.empty()) out.recall = static_cast<double>(hits) / static_cast<double>(rel.size());
  if (out.precision + out.recall > 0.0) out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

void EvalReport::append(const EvalReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  per_query.insert(per_query.end(), other.per_query.begin(), other.per_query.end());
}

const SweepRow* EvalReport::find(const std::string& method, int length, int radius) const {
  for (const auto& r : rows)
    if (r.method == method && r.length == length && r.radius == radius) return &r;
  return nullptr;
}

EvalReport sweep(const std::string& method, const CodeMatrix& train_codes, std::span<const DocId> train_ids,
                 const CodeMatrix& query_codes, std::span<const DocId> query_ids, const GroundTruth& truth,
                 std::span<const int> lengths, std::span<const int> radii, unsigned threads) {
  if (query_codes.size() != query_ids.size()) throw std::invalid_argument("query codes and ids differ in size");
  if (truth.queries.size() != truth.relevant.size()) throw std::invalid_argument("malformed ground truth");
  EvalReport report;
  for (int length : lengths) {
    if (length < 1 || length > train_codes.length || length > query_codes.length)
      throw std::invalid_argument("code length " + std::to_string(length) + " exceeds the trained length");
    const auto index = CodeIndex::build(train_codes.truncated(length), train_ids);
    const auto queries = query_codes.truncated(length);
    for (int radius : radii) {
      if (radius < 0 || radius > length)
        throw std::invalid_argument("radius " + std::to_string(radius) + " exceeds code length " + std::to_string(length));
      std::vector<QueryScore> scores(truth.queries.size());
      parallel_for(truth.queries.size(), threads, [&](std::size_t s) {
        const std::size_t q = truth.queries[s];
        const auto retrieved = index.query(queries.code(q), radius);
        scores[s] = {method, length, radius, query_ids[q], retrieved.size(), truth.relevant[s].size(),
                     prf(retrieved, truth.relevant[s])};
      });

      SweepRow row{method, length, radius, 0.0, 0.0, 0.0, scores.size(), 0};
      for (const auto& sc : scores) {
        row.mean_precision += sc.scores.precision;
        row.mean_recall += sc.scores.recall;
        row.mean_f1 += sc.scores.f1;
        if (sc.retrieved == 0) ++row.n_empty;
      }
      if (!scores.empty()) {
        const auto count = static_cast<double>(scores.size());
        row.mean_precision /= count;
        row.mean_recall /= count;
        row.mean_f1 /= count;
      }
      report.rows.push_back(row);
      report.per_query.insert(report.per_query.end(), scores.begin(), scores.end());
    }
  }
  return report;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_report_tsv(const EvalReport& report, std::ostream& out) {
  out << "# scores are macro-averaged over queries (mean of per-query precision, recall and F1);"
         " an empty retrieval scores 0\n";
  out << "method\tcode_length\tradius\tmean_precision\tmean_recall\tmean_f1\tn_queries\tn_empty\n";
  for (const auto& r : report.rows)
    out << r.method << '\t' << r.length << '\t' << r.radius << '\t' << fixed(r.mean_precision) << '\t'
        << fixed(r.mean_recall) << '\t' << fixed(r.mean_f1) << '\t' << r.n_queries << '\t' << r.n_empty << '\n';
}

void write_per_query_tsv(const EvalReport& report, std::ostream& out) {
  out << "method\tcode_length\tradius\tquery_id\tn_retrieved\tn_relevant\tprecision\trecall\tf1\n";
  for (const auto& q : report.per_query)
    out << q.method << '\t' << q.length << '\t' << q.radius << '\t' << q.query_id << '\t' << q.retrieved << '\t'
        << q.relevant << '\t' << fixed(q.scores.precision) << '\t' << fixed(q.scores.recall) << '\t'
        << fixed(q.scores.f1) << '\n';
}

void write_plot_data(const EvalReport& report, int radius, std::ostream& out) {
  out << "# precision-recall points at radius " << radius << ", one per code length\n";
  out << "method\tcode_length\trecall\tprecision\n";
  for (const auto& r : report.rows)
    if (r.radius == radius)
      out << r.method << '\t' << r.length << '\t' << fixed(r.mean_recall) << '\t' << fixed(r.mean_precision) << '\n';
}

}  // namespace sth
