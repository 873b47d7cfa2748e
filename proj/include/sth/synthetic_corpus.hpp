#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sth/corpus.hpp"

namespace sth {

/// Seeded generator of labelled plain-text documents with topical structure,
/// used as a desk-scale stand-in for newsgroup-style collections. Each topic
/// owns a Zipf-weighted set of content words and a few subtopics with their
/// own words; documents mix topic, subtopic, background and stop words.
struct SyntheticCorpusOptions {
  std::size_t documents = 2000;
  std::size_t topics = 20;
  std::size_t subtopics = 3;
  std::size_t vocabulary = 6000;
  std::size_t topic_words = 150;
  std::size_t subtopic_words = 40;
  std::size_t min_length = 60;
  std::size_t max_length = 180;
  double topic_share = 0.40;
  double subtopic_share = 0.15;
  double stopword_share = 0.15;  // the remainder is background vocabulary
  std::uint64_t seed = 1;
};

struct SyntheticDocument {
  Label topic = 0;
  std::string text;
};

std::vector<SyntheticDocument> generate_text_corpus(const SyntheticCorpusOptions& options);

/// Writes <root>/topic_NN/doc_NNNNNN.txt, the layout load_text_directory reads.
void write_text_corpus(const std::vector<SyntheticDocument>& docs, const std::filesystem::path& root);

/// Tokenises every document; returns term counts labelled by topic.
Corpus vectorize(const std::vector<SyntheticDocument>& docs, const StopWords& stopwords, Vocabulary& vocab);

/// generate -> vectorize -> tf-idf -> drop zero-norm documents.
Corpus synthetic_tfidf_corpus(const SyntheticCorpusOptions& options);

}  // namespace sth
