#include "sth/hashfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "sth/common.hpp"
#include "sth/detail/binary_io.hpp"
#include "sth/rng.hpp"

namespace sth {

namespace {

void add_scaled(Eigen::VectorXd& w, const SparseDocVector& x, double scale) {
  for (const auto& e : x.entries) w(e.index) += scale * e.weight;
}

double training_accuracy(const Corpus& train, std::span<const int> labels, const Eigen::VectorXd& w) {
  if (train.empty()) return 1.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const bool on = train[i].dot(w) > 0.0;
    if (on == (labels[i] > 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(train.size());
}

}  // namespace

double svm_primal_objective(const Corpus& train, std::span<const int> labels, double c, const Eigen::VectorXd& w) {
  const double per_sample = train.empty() ? 0.0 : c / static_cast<double>(train.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < train.size(); ++i)
    loss += std::max(0.0, 1.0 - labels[i] * train[i].dot(w));
  return 0.5 * w.squaredNorm() + per_sample * loss;
}

double svm_dual_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
  return alpha.sum() - 0.5 * w.squaredNorm();
}

TrainedBit train_bit(const Corpus& train, std::span<const int> labels, const TrainConfig& config, int bit_index,
                     const EpochObserver& observer) {
  const std::size_t n = train.size();
  if (labels.size() != n) throw std::invalid_argument("label count differs from the corpus size");
  if (!(config.c > 0.0)) throw std::invalid_argument("C must be positive");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 1 && y != -1) throw std::invalid_argument("labels must be +1 or -1");
    if (y == 1) ++positives;
  }
  for (const auto& doc : train.docs())
    for (const auto& e : doc.entries)
      if (!std::isfinite(e.weight)) throw std::invalid_argument("non-finite feature in doc " + std::to_string(doc.doc_id));
  if (n > 0 && (positives == 0 || positives == n))
    warn("bit " + std::to_string(bit_index) + " has a single class; its classifier predicts that class");

  TrainedBit out;
  out.model.bit_index = bit_index;
  out.model.weights = Eigen::VectorXd::Zero(train.vocab_size());
  out.dual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (n == 0) {
    out.stats.converged = true;
    return out;
  }

  const double upper = config.c / static_cast<double>(n);
  Eigen::VectorXd& w = out.model.weights;
  Eigen::VectorXd& alpha = out.dual;
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = train[i].squared_norm();

  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::size_t active_size = n;
  double pg_max_old = std::numeric_limits<double>::infinity();
  double pg_min_old = -std::numeric_limits<double>::infinity();
  Rng rng(config.seed);

  int epoch = 0;
  while (epoch < config.max_epochs) {
    ++epoch;
    rng.shuffle(std::span<std::size_t>(active.data(), active_size));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();

    for (std::size_t s = 0; s < active_size;) {
      const std::size_t i = active[s];
      if (qd[i] == 0.0) {
        // Empty document: its dual variable cannot move w.
        ++s;
        continue;
      }
      const double y = labels[i];
      const double g = y * train[i].dot(w) - 1.0;
      double pg = 0.0;
      const auto a = static_cast<Eigen::Index>(i);
      if (alpha(a) == 0.0) {
        if (config.shrinking && g > pg_max_old) {
          std::swap(active[s], active[--active_size]);
          continue;
        }
        pg = std::min(g, 0.0);
      } else if (alpha(a) == upper) {
        if (config.shrinking && g < pg_min_old) {
          std::swap(active[s], active[--active_size]);
          continue;
        }
        pg = std::max(g, 0.0);
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(a);
        alpha(a) = std::min(std::max(old - g / qd[i], 0.0), upper);
        add_scaled(w, train[i], (alpha(a) - old) * y);
      }
      ++s;
    }

    if (observer) observer(epoch, svm_primal_objective(train, labels, config.c, w), svm_dual_objective(alpha, w));

    if (pg_max - pg_min <= config.tolerance || active_size == 0) {
      if (active_size == n) {
        out.stats.converged = true;
        break;
      }
      // Re-check everything before declaring convergence.
      active_size = n;
      pg_max_old = std::numeric_limits<double>::infinity();
      pg_min_old = -std::numeric_limits<double>::infinity();
      continue;
    }
    pg_max_old = pg_max > 0.0 ? pg_max : std::numeric_limits<double>::infinity();
    pg_min_old = pg_min < 0.0 ? pg_min : -std::numeric_limits<double>::infinity();
  }
  if (!out.stats.converged)
    warn("bit " + std::to_string(bit_index) + ": SVM reached max_epochs = " + std::to_string(config.max_epochs));

  out.stats.epochs = epoch;
  out.stats.primal = svm_primal_objective(train, labels, config.c, w);
  out.stats.dual = svm_dual_objective(alpha, w);
  out.stats.relative_gap = out.stats.primal > 0.0 ? (out.stats.primal - out.stats.dual) / out.stats.primal : 0.0;
  out.stats.accuracy = training_accuracy(train, labels, w);
  return out;
}

HashModel train_all(const Corpus& train, const CodeMatrix& codes, const TrainConfig& config, unsigned threads,
                    std::vector<BitTrainingStats>* stats) {
  if (codes.size() != train.size())
    throw std::invalid_argument("code matrix has " + std::to_string(codes.size()) + " rows for " +
                                std::to_string(train.size()) + " documents");
  const auto l = static_cast<std::size_t>(codes.length);
  HashModel model;
  model.config = config;
  model.weights.resize(static_cast<Eigen::Index>(l), train.vocab_size());
  std::vector<BitTrainingStats> bit_stats(l);
  parallel_for(l, threads, [&](std::size_t p) {
    std::vector<int> labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) labels[i] = ((codes.rows[i] >> p) & 1U) ? 1 : -1;
    auto trained = train_bit(train, labels, config, static_cast<int>(p));
    model.weights.row(static_cast<Eigen::Index>(p)) = trained.model.weights.transpose();
    bit_stats[p] = trained.stats;
  });
  if (stats) *stats = std::move(bit_stats);
  return model;
}

BitCode predict_code(const HashModel& model, const SparseDocVector& x) {
  if (model.length() < 1 || model.length() > kMaxCodeLength) throw std::invalid_argument("invalid hash model length");
  Eigen::VectorXd score = Eigen::VectorXd::Zero(model.length());
  for (const auto& e : x.entries) {
    if (e.index < 0 || e.index >= model.vocab_size())
      throw std::out_of_range("term index " + std::to_string(e.index) + " outside the model vocabulary (" +
                              std::to_string(model.vocab_size()) + ")");
    score += e.weight * model.weights.col(e.index);
  }
  std::uint64_t bits = 0;
  for (Eigen::Index p = 0; p < score.size(); ++p)
    if (score(p) > 0.0) bits |= std::uint64_t{1} << p;
  return BitCode(bits, model.length());
}

CodeMatrix predict_codes(const HashModel& model, const Corpus& docs) {
  CodeMatrix out{model.length(), {}};
  out.rows.reserve(docs.size());
  for (const auto& d : docs.docs()) out.push_back(predict_code(model, d));
  return out;
}

namespace {
constexpr std::array<char, 8> kModelMagic = {'S', 'T', 'H', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

void write_model(const HashModel& model, std::ostream& out) {
  using detail::put_le;
  out.write(kModelMagic.data(), kModelMagic.size());
  put_le<std::uint32_t>(out, kModelVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.length()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(model.vocab_size()));
  put_le<double>(out, model.config.c);
  put_le<double>(out, model.config.tolerance);
  put_le<std::int32_t>(out, model.config.max_epochs);
  put_le<std::uint64_t>(out, model.config.seed);
  for (Eigen::Index p = 0; p < model.weights.rows(); ++p)
    for (Eigen::Index t = 0; t < model.weights.cols(); ++t) put_le<double>(out, model.weights(p, t));
}

HashModel read_model(std::istream& in) {
  using detail::get_le;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kModelMagic) throw ParseError("not a model file", 0);
  if (get_le<std::uint32_t>(in, "model file") != kModelVersion) throw ParseError("unsupported model version", 0);
  HashModel model;
  const auto l = get_le<std::uint32_t>(in, "model file");
  if (l < 1 || l > kMaxCodeLength) throw ParseError("model code length out of range", 0);
  const auto m = get_le<std::uint64_t>(in, "model file");
  if (m > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) throw ParseError("vocabulary too large", 0);
  model.config.c = get_le<double>(in, "model file");
  model.config.tolerance = get_le<double>(in, "model file");
  model.config.max_epochs = get_le<std::int32_t>(in, "model file");
  model.config.seed = get_le<std::uint64_t>(in, "model file");
  model.weights.resize(l, static_cast<Eigen::Index>(m));
  for (Eigen::Index p = 0; p < model.weights.rows(); ++p)
    for (Eigen::Index t = 0; t < model.weights.cols(); ++t) model.weights(p, t) = get_le<double>(in, "model file");
  return model;
}

}  // namespace sth
