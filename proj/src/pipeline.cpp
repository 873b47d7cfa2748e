#include "sth/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <istream>
#include <ostream>
#include <sstream>

#include "sth/rng.hpp"

namespace sth {

namespace {

template <typename F>
auto timed_stage(const std::string& name, double& seconds, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto result = f();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

TrainedSth train_sth(const Corpus& train, const PipelineConfig& config) {
  if (config.bits < 1 || config.bits > kMaxCodeLength)
    throw std::invalid_argument("code length must lie in [1, 64], got " + std::to_string(config.bits));
  TrainedSth out;
  out.corpus = drop_zero_norm(train, &out.excluded).with_role(CorpusRole::train);

  out.graph = timed_stage("graph", out.timings.graph_seconds,
                          [&] { return build_knn_graph(out.corpus, config.k, config.threads); });

  SpectralOptions spectral = config.spectral;
  spectral.lanczos.seed = Rng::substream(config.seed, "lanczos");
  out.embedding = timed_stage("spectral", out.timings.spectral_seconds, [&] {
    return solve_lapeig<double>(out.graph, static_cast<std::size_t>(config.bits), spectral);
  });

  out.binarized = timed_stage("binarize", out.timings.binarize_seconds, [&] { return median_binarize(out.embedding); });

  TrainConfig svm = config.svm;
  svm.seed = Rng::substream(config.seed, "svm");
  out.model = timed_stage("svm", out.timings.svm_seconds, [&] {
    return train_all(out.corpus, out.binarized.codes, svm, config.threads, &out.bit_stats);
  });
  return out;
}

Eigen::MatrixXd bit_correlations(const CodeMatrix& codes) {
  const Eigen::MatrixXd y = codes.signed_matrix();
  const Eigen::MatrixXd centred = y.rowwise() - y.colwise().mean();
  Eigen::MatrixXd cov = centred.transpose() * centred;
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  for (Eigen::Index a = 0; a < cov.rows(); ++a)
    for (Eigen::Index b = 0; b < cov.cols(); ++b)
      cov(a, b) = (sd(a) > 0.0 && sd(b) > 0.0) ? cov(a, b) / (sd(a) * sd(b)) : 0.0;
  return cov;
}

nlohmann::json training_diagnostics(const TrainedSth& trained, const PipelineConfig& config) {
  using nlohmann::json;
  json j;
  j["config"] = {{"k", config.k},
                 {"bits", config.bits},
                 {"seed", config.seed},
                 {"svm", {{"C", config.svm.c}, {"tolerance", config.svm.tolerance}, {"max_epochs", config.svm.max_epochs}}}};
  j["documents"] = trained.corpus.size();
  j["excluded_zero_norm"] = trained.excluded;
  j["graph"] = {{"nonzeros", trained.graph.adjacency.nonZeros()}, {"isolated", trained.graph.isolated_nodes().size()}};
  j["eigensolver"] = {{"method", trained.embedding.stats.method},
                      {"iterations", trained.embedding.stats.iterations},
                      {"residuals", trained.embedding.stats.residuals},
                      {"extra_null_vectors", trained.embedding.stats.extra_null_vectors}};
  j["eigenvalues"] = std::vector<double>(trained.embedding.eigenvalues.data(),
                                         trained.embedding.eigenvalues.data() + trained.embedding.eigenvalues.size());
  j["thresholds"] = trained.binarized.thresholds.values;

  json bits = json::array();
  for (int p = 0; p < trained.binarized.codes.length; ++p) {
    const auto& s = trained.bit_stats.at(static_cast<std::size_t>(p));
    bits.push_back({{"bit", p},
                    {"on_count", trained.binarized.codes.on_count(p)},
                    {"epochs", s.epochs},
                    {"converged", s.converged},
                    {"primal", s.primal},
                    {"dual", s.dual},
                    {"relative_gap", s.relative_gap},
                    {"training_accuracy", s.accuracy}});
  }
  j["bits"] = bits;

  const auto corr = bit_correlations(trained.binarized.codes);
  double max_abs = 0.0;
  for (Eigen::Index a = 0; a < corr.rows(); ++a)
    for (Eigen::Index b = a + 1; b < corr.cols(); ++b) max_abs = std::max(max_abs, std::abs(corr(a, b)));
  j["max_abs_bit_correlation"] = max_abs;
  return j;
}

std::vector<int> default_code_lengths(int bits) {
  std::vector<int> out;
  for (int l : {4, 8, 16, 32, 64})
    if (l <= bits) out.push_back(l);
  if (out.empty() || out.back() != bits) out.push_back(bits);
  return out;
}

void write_embedding(const Embedding<double>& embedding, const BinarizationThresholds& thresholds, std::ostream& out) {
  const auto n = embedding.coords.rows();
  const auto l = embedding.coords.cols();
  out << "sth-embedding 1\n" << n << ' ' << l << "\neigenvalues";
  for (Eigen::Index p = 0; p < l; ++p) out << ' ' << shortest(embedding.eigenvalues(p));
  out << "\nthresholds";
  for (double t : thresholds.values) out << ' ' << shortest(t);
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < l; ++p) out << (p ? " " : "") << shortest(embedding.coords(i, p));
    out << '\n';
  }
}

namespace {

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) throw ParseError("malformed number '" + token + "'", line);
  return v;
}

}  // namespace

Embedding<double> read_embedding(std::istream& in, BinarizationThresholds* thresholds) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "sth-embedding" || version != 1) throw ParseError("not an embedding file", 1);
  Eigen::Index n = 0;
  Eigen::Index l = 0;
  if (!(in >> n >> l) || n < 0 || l < 0) throw ParseError("malformed embedding header", 2);
  Embedding<double> e;
  e.coords.resize(n, l);
  e.eigenvalues.resize(l);
  std::string token;
  if (!(in >> token) || token != "eigenvalues") throw ParseError("expected eigenvalues", 3);
  for (Eigen::Index p = 0; p < l; ++p) {
    in >> token;
    e.eigenvalues(p) = parse_double(token, 3);
  }
  if (!(in >> token) || token != "thresholds") throw ParseError("expected thresholds", 4);
  BinarizationThresholds t;
  for (Eigen::Index p = 0; p < l; ++p) {
    in >> token;
    t.values.push_back(parse_double(token, 4));
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index p = 0; p < l; ++p) {
      if (!(in >> token)) throw ParseError("truncated embedding rows", static_cast<std::size_t>(5 + i));
      e.coords(i, p) = parse_double(token, static_cast<std::size_t>(5 + i));
    }
  if (thresholds) *thresholds = std::move(t);
  return e;
}

}  // namespace sth
