// Writes a seeded synthetic text collection as <root>/topic_NN/doc_NNNNNN.txt.

#include <iostream>

#include <CLI11.hpp>

#include "sth/synthetic_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic topical text collection"};
  sth::SyntheticCorpusOptions opts;
  std::string root;
  app.add_option("--out", root, "Output directory")->required();
  app.add_option("--documents", opts.documents, "Number of documents")->capture_default_str();
  app.add_option("--topics", opts.topics, "Number of topics")->capture_default_str();
  app.add_option("--subtopics", opts.subtopics, "Subtopics per topic")->capture_default_str();
  app.add_option("--vocabulary", opts.vocabulary, "Pseudo-word vocabulary size")->capture_default_str();
  app.add_option("--seed", opts.seed, "Generator seed")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }
  try {
    sth::write_text_corpus(sth::generate_text_corpus(opts), root);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
