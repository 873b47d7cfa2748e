#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "sth/common.hpp"

namespace sth {

struct TermWeight {
  std::int32_t index;  // 0-based
  double weight;

  friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

/// One document as a sparse term vector. Entries are sorted by index with no
/// duplicates.
struct SparseDocVector {
  DocId doc_id = 0;
  std::vector<TermWeight> entries;
  std::optional<Label> label;

  double squared_norm() const;
  double norm() const;
  std::size_t nonzeros() const { return entries.size(); }

  /// Sparse-dense dot product. Indices must be < dense.size().
  template <typename Derived>
  typename Derived::Scalar dot(const Eigen::MatrixBase<Derived>& dense) const {
    typename Derived::Scalar sum(0);
    for (const auto& e : entries) sum += static_cast<typename Derived::Scalar>(e.weight) * dense(e.index);
    return sum;
  }

  friend bool operator==(const SparseDocVector&, const SparseDocVector&) = default;
};

/// Exact sparse dot product, accumulated over shared indices in ascending order.
double sparse_dot(const SparseDocVector& a, const SparseDocVector& b);

enum class CorpusRole { unspecified, train, test };

/// Immutable document collection. Construction validates every invariant:
/// sorted unique term indices below vocab_size, finite nonnegative weights,
/// unique doc ids.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<SparseDocVector> docs, std::int32_t vocab_size,
         CorpusRole role = CorpusRole::unspecified);

  const std::vector<SparseDocVector>& docs() const { return docs_; }
  const SparseDocVector& operator[](std::size_t i) const { return docs_[i]; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  std::int32_t vocab_size() const { return vocab_size_; }
  CorpusRole role() const { return role_; }

  std::vector<DocId> doc_ids() const;
  Corpus with_role(CorpusRole role) const { return Corpus(docs_, vocab_size_, role); }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<SparseDocVector> docs_;
  std::int32_t vocab_size_ = 0;
  CorpusRole role_ = CorpusRole::unspecified;
};

// Sparse vector text format, one document per line:
//   <label> <idx>:<weight> <idx>:<weight> ...
// Indices are 1-based and strictly ascending. '#' starts a comment. The label
// may be omitted (line starts with an idx:weight pair). A comment of the form
// "# vocab_size: <m>" declares the vocabulary size; otherwise it is one past
// the largest index seen. Documents get doc_id = 0-based line ordinal among
// document lines.
Corpus parse_sparse(std::istream& in);
Corpus load_sparse(const std::filesystem::path& path);
void write_sparse(const Corpus& corpus, std::ostream& out);
void save_sparse(const Corpus& corpus, const std::filesystem::path& path);

/// Replaces term counts by tf * ln(n / df). Terms present in every document
/// get weight 0 and are removed.
Corpus tfidf_weight(const Corpus& raw);

/// Removes documents with no positive weight and reports each one via warn().
Corpus drop_zero_norm(const Corpus& corpus, std::vector<DocId>* dropped = nullptr);

class Vocabulary {
 public:
  std::int32_t index_of(std::string_view word);  // inserts when missing
  std::optional<std::int32_t> find(std::string_view word) const;
  std::int32_t size() const { return static_cast<std::int32_t>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::unordered_map<std::string, std::int32_t> lookup_;
  std::vector<std::string> words_;
};

using StopWords = std::unordered_set<std::string>;

const StopWords& default_stopwords();
StopWords load_stopwords(const std::filesystem::path& path);

/// Lowercases, splits on non-alphanumerics, drops stop words and counts the
/// remaining tokens against the caller's vocabulary.
SparseDocVector tokenize_basic(std::string_view text, const StopWords& stopwords, Vocabulary& vocab);

struct TextCollection {
  Corpus counts;                        // raw term counts
  std::vector<std::string> label_names;  // label i <-> label_names[i]
};

/// One document per regular file under <root>/<topic>/; topics are numbered
/// in sorted directory-name order, files in sorted path order.
TextCollection load_text_directory(const std::filesystem::path& root, const StopWords& stopwords,
                                   Vocabulary& vocab);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// round(fraction * n), halves rounded away from zero.
std::size_t split_train_size(std::size_t n, double fraction);

/// Random partition; both halves keep the original document order.
CorpusSplit split(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace sth
