// Command-line front end: prep, train, index, query, eval.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sth/baselines.hpp"
#include "sth/corpus.hpp"
#include "sth/eval.hpp"
#include "sth/hashcodes.hpp"
#include "sth/hashfn.hpp"
#include "sth/knn_graph.hpp"
#include "sth/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sth;

namespace {

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("not an integer: " + item);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_word_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

struct PrepArgs {
  std::string input;
  std::string out;
  std::string stopwords;
  std::string weighting = "tfidf";
  double split = 0.0;
  std::uint64_t seed = 0;
};

struct TrainArgs {
  std::string train;
  std::string out;
  std::string method = "sth";
  std::string solver = "auto";
  std::size_t k = 25;
  int bits = 16;
  double c = 1.0;
  double tolerance = 1e-3;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
};

struct IndexArgs {
  std::string codes;
  std::string out;
};

struct QueryArgs {
  std::string doc;
  std::string index;
  std::string model;
  std::string lsh;
  int radius = 1;
};

struct EvalArgs {
  std::string train;
  std::string test;
  std::string model_dir;
  std::string truth = "knn";
  std::string method = "sth";
  std::string compare;
  std::string radii = "0,1,2,3";
  std::string lengths;
  std::string out;
  std::string per_query;
  std::string plot_data;
  std::string solver = "auto";
  std::size_t k = 25;
  std::size_t graph_k = 0;
  int bits = 16;
  int plot_radius = 1;
  double c = 1.0;
  std::uint64_t seed = 0;
};

EigenSolverKind solver_kind(const std::string& name) {
  if (name == "dense") return EigenSolverKind::dense;
  if (name == "lanczos") return EigenSolverKind::lanczos;
  return EigenSolverKind::automatic;
}

void cmd_prep(const PrepArgs& a) {
  const fs::path input(a.input);
  Corpus raw({}, 0);
  std::vector<std::string> words;
  std::vector<std::string> labels;
  if (fs::is_directory(input)) {
    const StopWords stop = a.stopwords.empty() ? default_stopwords() : load_stopwords(a.stopwords);
    Vocabulary vocab;
    auto text = load_text_directory(input, stop, vocab);
    raw = std::move(text.counts);
    words = vocab.words();
    labels = std::move(text.label_names);
  } else {
    raw = load_sparse(input);
  }
  const Corpus weighted = a.weighting == "tfidf" ? tfidf_weight(raw) : raw;

  const fs::path out(a.out);
  const fs::path stem = out.parent_path() / out.stem();
  if (!words.empty()) {
    auto f = open_out(fs::path(stem.string() + ".vocab"));
    for (const auto& w : words) f << w << '\n';
  }
  if (!labels.empty()) {
    auto f = open_out(fs::path(stem.string() + ".labels"));
    for (std::size_t i = 0; i < labels.size(); ++i) f << i << '\t' << labels[i] << '\n';
  }
  if (a.split > 0.0) {
    const auto parts = split(weighted, a.split, a.seed);
    save_sparse(parts.train, fs::path(stem.string() + ".train.sv"));
    save_sparse(parts.test, fs::path(stem.string() + ".test.sv"));
    std::cerr << "prep: " << parts.train.size() << " train / " << parts.test.size() << " test documents, "
              << weighted.vocab_size() << " terms\n";
  } else {
    save_sparse(weighted, out);
    std::cerr << "prep: " << weighted.size() << " documents, " << weighted.vocab_size() << " terms\n";
  }
}

PipelineConfig pipeline_config(std::size_t k, int bits, double c, double tolerance, int max_epochs,
                               std::uint64_t seed, const std::string& solver, unsigned threads) {
  PipelineConfig cfg;
  cfg.k = k;
  cfg.bits = bits;
  cfg.svm.c = c;
  cfg.svm.tolerance = tolerance;
  cfg.svm.max_epochs = max_epochs;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.spectral.solver = solver_kind(solver);
  return cfg;
}

void cmd_train(const TrainArgs& a, unsigned threads) {
  const Corpus train = load_sparse(a.train);
  const fs::path out(a.out);
  fs::create_directories(out);

  if (a.method == "lsh") {
    const auto model = lsh_train(train.vocab_size(), a.bits, a.seed);
    auto f = open_out(out / "lsh.txt");
    write_lsh(model, f);
    auto codes = open_out(out / "codes.txt");
    const auto ids = train.doc_ids();
    write_codes(lsh_codes(model, train), ids, codes);
    return;
  }

  const auto cfg = pipeline_config(a.k, a.bits, a.c, a.tolerance, a.max_epochs, a.seed, a.solver, threads);
  const auto trained = train_sth(train, cfg);
  {
    auto f = open_out(out / "graph.txt");
    write_graph(trained.graph, f);
  }
  {
    auto f = open_out(out / "embedding.txt");
    write_embedding(trained.embedding, trained.binarized.thresholds, f);
  }
  {
    auto f = open_out(out / "codes.txt");
    const auto ids = trained.corpus.doc_ids();
    write_codes(trained.binarized.codes, ids, f);
  }
  {
    auto f = open_out(out / "model.bin", true);
    write_model(trained.model, f);
  }
  {
    auto f = open_out(out / "model.json");
    f << training_diagnostics(trained, cfg).dump(2) << '\n';
  }
  auto log = open_out(out / "train.log");
  const auto& t = trained.timings;
  log << "documents " << trained.corpus.size() << " excluded " << trained.excluded.size() << '\n'
      << "graph_seconds " << t.graph_seconds << '\n'
      << "spectral_seconds " << t.spectral_seconds << '\n'
      << "binarize_seconds " << t.binarize_seconds << '\n'
      << "svm_seconds " << t.svm_seconds << '\n'
      << "total_seconds " << t.total() << '\n';
  std::cerr << "train: " << trained.corpus.size() << " documents, " << a.bits << " bits, " << t.total() << " s\n";
}

void cmd_index(const IndexArgs& a) {
  auto in = open_in(a.codes);
  std::vector<DocId> ids;
  const auto codes = read_codes(in, &ids);
  const auto index = CodeIndex::build(codes, ids);
  auto out = open_out(a.out, true);
  write_index(index, out);
  std::cerr << "index: " << index.size() << " documents in " << index.bucket_count() << " buckets\n";
}

void cmd_query(const QueryArgs& a) {
  if (a.model.empty() == a.lsh.empty()) throw CLI::ValidationError("query", "exactly one of --model or --lsh is required");
  const Corpus queries = load_sparse(a.doc);
  auto index_in = open_in(a.index, true);
  const auto index = read_index(index_in);
  auto encode = [&]() -> std::function<BitCode(const SparseDocVector&)> {
    if (!a.model.empty()) {
      auto in = open_in(a.model, true);
      auto model = std::make_shared<HashModel>(read_model(in));
      return [model](const SparseDocVector& x) { return predict_code(*model, x); };
    }
    auto in = open_in(a.lsh);
    auto model = std::make_shared<LshModel>(read_lsh(in));
    return [model](const SparseDocVector& x) { return lsh_code(*model, x); };
  }();
  for (const auto& q : queries.docs()) {
    const BitCode code = encode(q);
    if (code.length() != index.length())
      throw std::runtime_error("model produces " + std::to_string(code.length()) + "-bit codes, index holds " +
                               std::to_string(index.length()));
    if (queries.size() > 1) std::cout << "# query " << q.doc_id << '\n';
    for (const auto& [id, dist] : index.scan(code, a.radius)) std::cout << id << '\t' << dist << '\n';
  }
}

void cmd_eval(const EvalArgs& a, unsigned threads) {
  const Corpus train_all_docs = load_sparse(a.train);
  const Corpus test = load_sparse(a.test);
  const std::size_t graph_k = a.graph_k == 0 ? a.k : a.graph_k;
  const auto cfg = pipeline_config(graph_k, a.bits, a.c, 1e-3, 1000, a.seed, a.solver, threads);

  // Zero-norm training documents carry no code; all methods use the same base.
  const Corpus train = drop_zero_norm(train_all_docs);
  const auto train_ids = train.doc_ids();
  const auto test_ids = test.doc_ids();

  GroundTruth truth =
      a.truth == "topic" ? ground_truth_topic(train, test) : ground_truth_knn(train, test, a.k, threads);
  std::cerr << "eval: " << truth.queries.size() << " queries (" << truth.skipped << " skipped)\n";

  const std::vector<int> radii = parse_int_list(a.radii);
  const std::vector<int> lengths = a.lengths.empty() ? default_code_lengths(a.bits) : parse_int_list(a.lengths);
  std::vector<std::string> methods = a.compare.empty() ? std::vector<std::string>{a.method} : parse_word_list(a.compare);

  EvalReport report;
  for (const auto& method : methods) {
    if (method == "sth") {
      CodeMatrix train_codes, test_codes;
      if (!a.model_dir.empty()) {
        const fs::path dir(a.model_dir);
        auto model_in = open_in(dir / "model.bin", true);
        const auto model = read_model(model_in);
        auto codes_in = open_in(dir / "codes.txt");
        std::vector<DocId> ids;
        const auto stored = read_codes(codes_in, &ids);
        if (ids != train_ids) throw std::runtime_error("stored codes do not cover the training corpus");
        train_codes = stored;
        test_codes = predict_codes(model, test);
      } else {
        const auto trained = train_sth(train, cfg);
        train_codes = trained.binarized.codes;
        test_codes = predict_codes(trained.model, test);
      }
      report.append(sweep("sth", train_codes, train_ids, test_codes, test_ids, truth, lengths, radii, threads));
    } else if (method == "lsh") {
      const auto model = lsh_train(train.vocab_size(), a.bits, a.seed);
      report.append(sweep("lsh", lsh_codes(model, train), train_ids, lsh_codes(model, test), test_ids, truth, lengths,
                          radii, threads));
    } else {
      throw CLI::ValidationError("--method", "unknown method '" + method + "'");
    }
  }

  if (a.out.empty()) {
    write_report_tsv(report, std::cout);
  } else {
    auto f = open_out(a.out);
    write_report_tsv(report, f);
  }
  if (!a.per_query.empty()) {
    auto f = open_out(a.per_query);
    write_per_query_tsv(report, f);
  }
  if (!a.plot_data.empty()) {
    auto f = open_out(a.plot_data);
    write_plot_data(report, a.plot_radius, f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-taught hashing for document similarity search"};
  app.set_config("--config", "", "TOML-style config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::Range(1U, 1024U));

  PrepArgs prep;
  auto* p = app.add_subcommand("prep", "Build a TF-IDF sparse corpus from a text directory or a count file");
  p->add_option("--input", prep.input, "Directory of <topic>/<file> texts, or a sparse count file")
      ->required()
      ->check(CLI::ExistingPath);
  p->add_option("--out", prep.out, "Output sparse file (with --split: <stem>.train.sv and <stem>.test.sv)")->required();
  p->add_option("--split", prep.split, "Training fraction; 0 writes a single file")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  p->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
  p->add_option("--stopwords", prep.stopwords, "Stop-word list, one per line")->check(CLI::ExistingFile);
  p->add_option("--weighting", prep.weighting, "tfidf or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"tfidf", "none"}));

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Learn codes and hash functions for a training corpus");
  t->add_option("--train", train.train, "Training sparse file")->required()->check(CLI::ExistingFile);
  t->add_option("--out", train.out, "Output directory")->required();
  t->add_option("--method", train.method, "sth or lsh")->capture_default_str()->check(CLI::IsMember({"sth", "lsh"}));
  t->add_option("--k", train.k, "Neighbours per document in the similarity graph")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  t->add_option("--bits", train.bits, "Code length")->capture_default_str()->check(CLI::Range(1, 64));
  t->add_option("--c", train.c, "SVM slack weight C")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--tol", train.tolerance, "SVM stopping tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--max-epochs", train.max_epochs, "SVM epoch cap")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--solver", train.solver, "auto, dense or lanczos")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}));
  t->add_option("--seed", train.seed, "Master seed")->capture_default_str();

  IndexArgs index;
  auto* ix = app.add_subcommand("index", "Build a Hamming index from a codes file");
  ix->add_option("--codes", index.codes, "Codes file written by train")->required()->check(CLI::ExistingFile);
  ix->add_option("--out", index.out, "Index file")->required();

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Print indexed documents within a Hamming radius of each query");
  q->add_option("--doc", query.doc, "Query sparse file")->required()->check(CLI::ExistingFile);
  q->add_option("--index", query.index, "Index file")->required()->check(CLI::ExistingFile);
  q->add_option("--model", query.model, "Learned hash model (model.bin)")->check(CLI::ExistingFile);
  q->add_option("--lsh", query.lsh, "LSH model (lsh.txt)")->check(CLI::ExistingFile);
  q->add_option("--radius", query.radius, "Hamming radius")->capture_default_str()->check(CLI::Range(0, 64));

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Precision / recall / F1 sweep over code lengths and radii");
  e->add_option("--train", ev.train, "Training sparse file")->required()->check(CLI::ExistingFile);
  e->add_option("--test", ev.test, "Query sparse file")->required()->check(CLI::ExistingFile);
  e->add_option("--model-dir", ev.model_dir, "Directory written by train; trains in-process when absent")
      ->check(CLI::ExistingDirectory);
  e->add_option("--truth", ev.truth, "knn or topic")->capture_default_str()->check(CLI::IsMember({"knn", "topic"}));
  e->add_option("--k", ev.k, "Relevant neighbours per query for knn truth")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  e->add_option("--graph-k", ev.graph_k, "Graph neighbours when training in-process (default: --k)");
  e->add_option("--bits", ev.bits, "Trained code length")->capture_default_str()->check(CLI::Range(1, 64));
  e->add_option("--radii", ev.radii, "Comma-separated Hamming radii")->capture_default_str();
  e->add_option("--lengths", ev.lengths, "Comma-separated code lengths (default 4,8,16,32,64 up to --bits)");
  e->add_option("--method", ev.method, "sth or lsh")->capture_default_str()->check(CLI::IsMember({"sth", "lsh"}));
  e->add_option("--compare", ev.compare, "Comma-separated methods reported side by side");
  e->add_option("--c", ev.c, "SVM slack weight C")->capture_default_str()->check(CLI::PositiveNumber);
  e->add_option("--solver", ev.solver, "auto, dense or lanczos")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}));
  e->add_option("--seed", ev.seed, "Master seed (training and LSH)")->capture_default_str();
  e->add_option("--out", ev.out, "Report TSV (default: standard output)");
  e->add_option("--per-query", ev.per_query, "Per-query TSV");
  e->add_option("--plot-data", ev.plot_data, "Precision-recall points TSV");
  e->add_option("--plot-radius", ev.plot_radius, "Radius for --plot-data")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (*p) cmd_prep(prep);
    if (*t) cmd_train(train, threads);
    if (*ix) cmd_index(index);
    if (*q) cmd_query(query);
    if (*e) cmd_eval(ev, threads);
  } catch (const CLI::ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
