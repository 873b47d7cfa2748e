#include "sth/synthetic_corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "sth/rng.hpp"

namespace sth {

namespace {

// Distinct pronounceable pseudo-words: base-100 digits mapped to syllables.
std::string pseudo_word(std::size_t index) {
  static constexpr std::array<char, 20> consonants = {'b', 'c', 'd', 'f', 'g', 'h', 'j', 'k', 'l', 'm',
                                                      'n', 'p', 'r', 's', 't', 'v', 'w', 'x', 'z', 'q'};
  static constexpr std::array<char, 5> vowels = {'a', 'e', 'i', 'o', 'u'};
  std::size_t value = index + 100;  // at least two syllables
  std::string word;
  while (value > 0) {
    const std::size_t syllable = value % 100;
    word.push_back(consonants[syllable / 5]);
    word.push_back(vowels[syllable % 5]);
    value /= 100;
  }
  return word;
}

class ZipfSampler {
 public:
  ZipfSampler(std::size_t size, double exponent) : cumulative_(size) {
    double total = 0.0;
    for (std::size_t r = 0; r < size; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_[r] = total;
    }
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

std::vector<std::size_t> random_subset(Rng& rng, std::size_t universe, std::size_t count) {
  std::vector<std::size_t> all(universe);
  std::iota(all.begin(), all.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(all));
  all.resize(std::min(count, universe));
  return all;
}

}  // namespace

std::vector<SyntheticDocument> generate_text_corpus(const SyntheticCorpusOptions& options) {
  if (options.topics == 0 || options.vocabulary == 0 || options.subtopics == 0)
    throw std::invalid_argument("synthetic corpus needs topics, subtopics and vocabulary");
  if (options.min_length == 0 || options.min_length > options.max_length)
    throw std::invalid_argument("invalid document length range");

  Rng rng(Rng::substream(options.seed, "synthetic"));
  std::vector<std::string> words(options.vocabulary);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = pseudo_word(i);
  std::vector<std::string> stopwords(default_stopwords().begin(), default_stopwords().end());
  std::sort(stopwords.begin(), stopwords.end());

  std::vector<std::vector<std::size_t>> topic_vocab(options.topics);
  std::vector<std::vector<std::vector<std::size_t>>> subtopic_vocab(options.topics);
  for (std::size_t t = 0; t < options.topics; ++t) {
    topic_vocab[t] = random_subset(rng, options.vocabulary, options.topic_words);
    for (std::size_t s = 0; s < options.subtopics; ++s)
      subtopic_vocab[t].push_back(random_subset(rng, options.vocabulary, options.subtopic_words));
  }
  const ZipfSampler topic_sampler(options.topic_words, 1.0);
  const ZipfSampler subtopic_sampler(options.subtopic_words, 0.8);
  const ZipfSampler background_sampler(options.vocabulary, 1.1);
  const ZipfSampler stop_sampler(stopwords.size(), 1.0);

  std::vector<SyntheticDocument> docs(options.documents);
  for (std::size_t d = 0; d < options.documents; ++d) {
    const std::size_t topic = d % options.topics;
    const std::size_t sub = rng.uniform_index(options.subtopics);
    const std::size_t length =
        options.min_length + rng.uniform_index(options.max_length - options.min_length + 1);
    auto& text = docs[d].text;
    docs[d].topic = static_cast<Label>(topic);
    for (std::size_t w = 0; w < length; ++w) {
      const double u = rng.uniform01();
      const std::string* token = nullptr;
      if (u < options.topic_share) {
        token = &words[topic_vocab[topic][topic_sampler(rng)]];
      } else if (u < options.topic_share + options.subtopic_share) {
        token = &words[subtopic_vocab[topic][sub][subtopic_sampler(rng)]];
      } else if (u < options.topic_share + options.subtopic_share + options.stopword_share) {
        token = &stopwords[stop_sampler(rng)];
      } else {
        token = &words[background_sampler(rng)];
      }
      if (!text.empty()) text.push_back(w % 13 == 12 ? '\n' : ' ');
      text += *token;
    }
    text.push_back('\n');
  }
  return docs;
}

void write_text_corpus(const std::vector<SyntheticDocument>& docs, const std::filesystem::path& root) {
  char name[64];
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::snprintf(name, sizeof(name), "topic_%02lld", static_cast<long long>(docs[d].topic));
    const auto dir = root / name;
    std::filesystem::create_directories(dir);
    std::snprintf(name, sizeof(name), "doc_%06zu.txt", d);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << docs[d].text;
  }
}

Corpus vectorize(const std::vector<SyntheticDocument>& docs, const StopWords& stopwords, Vocabulary& vocab) {
  std::vector<SparseDocVector> vectors;
  vectors.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto v = tokenize_basic(docs[d].text, stopwords, vocab);
    v.doc_id = static_cast<DocId>(d);
    v.label = docs[d].topic;
    vectors.push_back(std::move(v));
  }
  return Corpus(std::move(vectors), vocab.size());
}

Corpus synthetic_tfidf_corpus(const SyntheticCorpusOptions& options) {
  Vocabulary vocab;
  return drop_zero_norm(tfidf_weight(vectorize(generate_text_corpus(options), default_stopwords(), vocab)));
}

}  // namespace sth
