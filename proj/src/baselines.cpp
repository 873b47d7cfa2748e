#include "sth/baselines.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "sth/rng.hpp"

namespace sth {

LshModel lsh_train(std::int32_t vocab_size, int length, std::uint64_t seed) {
  if (vocab_size < 1 || length < 1) throw std::invalid_argument("LSH needs m >= 1 and l >= 1");
  LshModel model;
  model.seed = seed;
  model.projections.resize(length, vocab_size);
  Rng rng(Rng::substream(seed, "lsh"));
  for (int p = 0; p < length; ++p)
    for (std::int32_t t = 0; t < vocab_size; ++t) model.projections(p, t) = rng.normal();
  return model;
}

Eigen::VectorXd lsh_project(const LshModel& model, const SparseDocVector& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(model.projections.rows());
  for (const auto& e : x.entries) {
    if (e.index >= model.vocab_size())
      throw std::out_of_range("term index " + std::to_string(e.index) + " outside the LSH vocabulary");
    out += e.weight * model.projections.col(e.index);
  }
  return out;
}

BitCode lsh_code(const LshModel& model, const SparseDocVector& x) {
  if (model.length() > kMaxCodeLength) throw std::invalid_argument("LSH codes are limited to 64 bits");
  const Eigen::VectorXd proj = lsh_project(model, x);
  std::uint64_t bits = 0;
  for (int p = 0; p < model.length(); ++p)
    if (proj(p) > 0.0) bits |= std::uint64_t{1} << p;
  return BitCode(bits, model.length());
}

CodeMatrix lsh_codes(const LshModel& model, const Corpus& docs) {
  CodeMatrix out{model.length(), {}};
  out.rows.reserve(docs.size());
  for (const auto& d : docs.docs()) out.push_back(lsh_code(model, d));
  return out;
}

void write_lsh(const LshModel& model, std::ostream& out) {
  out << "sth-lsh 1\n" << model.seed << ' ' << model.vocab_size() << ' ' << model.length() << '\n';
}

LshModel read_lsh(std::istream& in) {
  std::string tag;
  int version = 0;
  std::uint64_t seed = 0;
  std::int32_t m = 0;
  int l = 0;
  if (!(in >> tag >> version) || tag != "sth-lsh" || version != 1) throw ParseError("not an LSH model file", 1);
  if (!(in >> seed >> m >> l)) throw ParseError("malformed LSH model parameters", 2);
  return lsh_train(m, l, seed);
}

}  // namespace sth
