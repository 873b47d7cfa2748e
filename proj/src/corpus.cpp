#include "sth/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sth/rng.hpp"

namespace sth {

double SparseDocVector::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight;
  return s;
}

double SparseDocVector::norm() const { return std::sqrt(squared_norm()); }

double sparse_dot(const SparseDocVector& a, const SparseDocVector& b) {
  double sum = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      sum += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

Corpus::Corpus(std::vector<SparseDocVector> docs, std::int32_t vocab_size, CorpusRole role)
    : docs_(std::move(docs)), vocab_size_(vocab_size), role_(role) {
  if (vocab_size_ < 0) throw std::invalid_argument("vocab_size must be nonnegative");
  std::unordered_set<DocId> seen;
  seen.reserve(docs_.size());
  for (const auto& doc : docs_) {
    if (!seen.insert(doc.doc_id).second)
      throw std::invalid_argument("duplicate doc_id " + std::to_string(doc.doc_id));
    std::int32_t prev = -1;
    for (const auto& e : doc.entries) {
      if (e.index <= prev)
        throw std::invalid_argument("doc " + std::to_string(doc.doc_id) +
                                    ": term indices must be strictly increasing");
      if (e.index >= vocab_size_)
        throw std::invalid_argument("doc " + std::to_string(doc.doc_id) + ": term index " +
                                    std::to_string(e.index) + " >= vocab_size " +
                                    std::to_string(vocab_size_));
      if (!std::isfinite(e.weight) || e.weight < 0.0)
        throw std::invalid_argument("doc " + std::to_string(doc.doc_id) +
                                    ": weights must be finite and nonnegative");
      prev = e.index;
    }
  }
}

std::vector<DocId> Corpus::doc_ids() const {
  std::vector<DocId> ids;
  ids.reserve(docs_.size());
  for (const auto& d : docs_) ids.push_back(d.doc_id);
  return ids;
}

namespace {

constexpr std::string_view kVocabDirective = "vocab_size:";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Corpus parse_sparse(std::istream& in) {
  std::vector<SparseDocVector> docs;
  std::optional<std::int64_t> declared_vocab;
  std::int64_t max_index = -1;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      const auto comment = trim(view.substr(hash + 1));
      if (comment.starts_with(kVocabDirective)) {
        std::int64_t m = 0;
        if (!parse_number(trim(comment.substr(kVocabDirective.size())), m) || m < 0)
          throw ParseError("malformed vocab_size directive", line_no);
        declared_vocab = m;
      }
      view = view.substr(0, hash);
    }

    std::istringstream tokens{std::string(view)};
    std::string token;
    SparseDocVector doc;
    bool any = false;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (!any && colon == std::string::npos) {
        Label label = 0;
        if (!parse_number(std::string_view(token), label))
          throw ParseError("malformed label '" + token + "'", line_no);
        doc.label = label;
        any = true;
        continue;
      }
      any = true;
      if (colon == std::string::npos)
        throw ParseError("expected <idx>:<weight>, got '" + token + "'", line_no);
      std::int64_t idx = 0;
      double weight = 0.0;
      const std::string_view tv(token);
      if (!parse_number(tv.substr(0, colon), idx) || idx < 1 ||
          idx > std::numeric_limits<std::int32_t>::max())
        throw ParseError("malformed term index in '" + token + "'", line_no);
      if (!parse_number(tv.substr(colon + 1), weight) || !std::isfinite(weight))
        throw ParseError("malformed weight in '" + token + "'", line_no);
      if (weight < 0.0) throw ParseError("negative weight in '" + token + "'", line_no);
      const auto index = static_cast<std::int32_t>(idx - 1);
      if (!doc.entries.empty()) {
        if (doc.entries.back().index == index)
          throw ParseError("duplicate term index " + std::to_string(idx), line_no);
        if (doc.entries.back().index > index)
          throw ParseError("term indices must be ascending", line_no);
      }
      doc.entries.push_back({index, weight});
      max_index = std::max<std::int64_t>(max_index, index);
    }
    if (!any) continue;
    doc.doc_id = static_cast<DocId>(docs.size());
    docs.push_back(std::move(doc));
  }

  std::int64_t vocab = max_index + 1;
  if (declared_vocab) {
    if (*declared_vocab < vocab)
      throw ParseError("declared vocab_size " + std::to_string(*declared_vocab) +
                           " is smaller than the largest term index",
                       0);
    vocab = *declared_vocab;
  }
  return Corpus(std::move(docs), static_cast<std::int32_t>(vocab));
}

Corpus load_sparse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return parse_sparse(in);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), path.string());
  }
}

void write_sparse(const Corpus& corpus, std::ostream& out) {
  out << "# " << kVocabDirective << ' ' << corpus.vocab_size() << '\n';
  std::string line;
  for (const auto& doc : corpus.docs()) {
    line.clear();
    if (doc.label) line += std::to_string(*doc.label);
    for (const auto& e : doc.entries) {
      if (!line.empty()) line += ' ';
      line += std::to_string(e.index + 1);
      line += ':';
      append_double(line, e.weight);
    }
    // An unlabelled empty document has no representation; keep line count aligned.
    if (line.empty()) line = "0";
    out << line << '\n';
  }
}

void save_sparse(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sparse(corpus, out);
}

Corpus tfidf_weight(const Corpus& raw) {
  const auto n = static_cast<double>(raw.size());
  std::vector<std::size_t> df(static_cast<std::size_t>(raw.vocab_size()), 0);
  for (const auto& doc : raw.docs())
    for (const auto& e : doc.entries)
      if (e.weight > 0.0) ++df[static_cast<std::size_t>(e.index)];

  std::vector<SparseDocVector> docs;
  docs.reserve(raw.size());
  for (const auto& doc : raw.docs()) {
    SparseDocVector out{doc.doc_id, {}, doc.label};
    for (const auto& e : doc.entries) {
      const auto d = df[static_cast<std::size_t>(e.index)];
      if (e.weight <= 0.0 || d == raw.size()) continue;
      out.entries.push_back({e.index, e.weight * std::log(n / static_cast<double>(d))});
    }
    docs.push_back(std::move(out));
  }
  return Corpus(std::move(docs), raw.vocab_size(), raw.role());
}

Corpus drop_zero_norm(const Corpus& corpus, std::vector<DocId>* dropped) {
  std::vector<SparseDocVector> kept;
  kept.reserve(corpus.size());
  for (const auto& doc : corpus.docs()) {
    if (doc.squared_norm() > 0.0) {
      kept.push_back(doc);
    } else {
      warn("excluding zero-norm document " + std::to_string(doc.doc_id));
      if (dropped) dropped->push_back(doc.doc_id);
    }
  }
  return Corpus(std::move(kept), corpus.vocab_size(), corpus.role());
}

std::int32_t Vocabulary::index_of(std::string_view word) {
  if (auto it = lookup_.find(std::string(word)); it != lookup_.end()) return it->second;
  const auto idx = size();
  words_.emplace_back(word);
  lookup_.emplace(words_.back(), idx);
  return idx;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view word) const {
  if (auto it = lookup_.find(std::string(word)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

const StopWords& default_stopwords() {
  static const StopWords words = {
      "a",     "about", "above", "after",  "again", "against", "all",   "am",    "an",
      "and",   "any",   "are",   "as",     "at",    "be",      "because", "been", "before",
      "being", "below", "between", "both", "but",   "by",      "can",   "could", "did",
      "do",    "does",  "doing", "down",   "during", "each",   "few",   "for",   "from",
      "further", "had", "has",   "have",   "having", "he",     "her",   "here",  "hers",
      "herself", "him", "himself", "his",  "how",   "i",       "if",    "in",    "into",
      "is",    "it",    "its",   "itself", "just",  "me",      "more",  "most",  "my",
      "myself", "no",   "nor",   "not",    "now",   "of",      "off",   "on",    "once",
      "only",  "or",    "other", "our",    "ours",  "ourselves", "out", "over",  "own",
      "same",  "she",   "should", "so",    "some",  "such",    "than",  "that",  "the",
      "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
      "those", "through", "to",  "too",    "under", "until",   "up",    "very",  "was",
      "we",    "were",  "what",  "when",   "where", "which",   "while", "who",   "whom",
      "why",   "will",  "with",  "would",  "you",   "your",    "yours", "yourself",
      "yourselves"};
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  StopWords words;
  std::string w;
  while (in >> w) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
    words.insert(w);
  }
  return words;
}

SparseDocVector tokenize_basic(std::string_view text, const StopWords& stopwords, Vocabulary& vocab) {
  std::unordered_map<std::int32_t, double> counts;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && !stopwords.contains(token)) counts[vocab.index_of(token)] += 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();

  SparseDocVector doc;
  doc.entries.reserve(counts.size());
  for (const auto& [idx, count] : counts) doc.entries.push_back({idx, count});
  std::sort(doc.entries.begin(), doc.entries.end(),
            [](const TermWeight& a, const TermWeight& b) { return a.index < b.index; });
  return doc;
}

TextCollection load_text_directory(const std::filesystem::path& root, const StopWords& stopwords,
                                   Vocabulary& vocab) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw std::runtime_error(root.string() + " is not a directory");

  std::vector<fs::path> topics;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) topics.push_back(entry.path());
  std::sort(topics.begin(), topics.end());

  TextCollection result;
  std::vector<SparseDocVector> docs;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    result.label_names.push_back(topics[t].filename().string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(topics[t]))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      std::stringstream buffer;
      buffer << in.rdbuf();
      auto doc = tokenize_basic(buffer.str(), stopwords, vocab);
      doc.doc_id = static_cast<DocId>(docs.size());
      doc.label = static_cast<Label>(t);
      docs.push_back(std::move(doc));
    }
  }
  result.counts = Corpus(std::move(docs), vocab.size());
  return result;
}

std::size_t split_train_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

CorpusSplit split(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  if (corpus.empty()) throw std::invalid_argument("cannot split an empty corpus");

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = split_train_size(corpus.size(), fraction);
  std::vector<bool> in_train(corpus.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  std::vector<SparseDocVector> train;
  std::vector<SparseDocVector> test;
  for (std::size_t i = 0; i < corpus.size(); ++i) (in_train[i] ? train : test).push_back(corpus[i]);
  return {Corpus(std::move(train), corpus.vocab_size(), CorpusRole::train),
          Corpus(std::move(test), corpus.vocab_size(), CorpusRole::test)};
}

}  // namespace sth
