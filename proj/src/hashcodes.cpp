#include "sth/hashcodes.hpp"

#include "sth/detail/binary_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <limits>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace sth {

BitCode::BitCode(std::uint64_t bits, int length) : bits_(bits), length_(length) {
  if (length < 1 || length > kMaxCodeLength)
    throw std::invalid_argument("code length must lie in [1, 64], got " + std::to_string(length));
  if ((bits & ~mask(length)) != 0) throw std::invalid_argument("bits set beyond the code length");
}

BitCode BitCode::truncated(int length) const {
  if (length < 1 || length > length_) throw std::invalid_argument("cannot truncate to a longer code");
  return BitCode(bits_ & mask(length), length);
}

std::string BitCode::to_string() const {
  std::string s(static_cast<std::size_t>(length_), '0');
  for (int p = 0; p < length_; ++p)
    if (bit(p)) s[static_cast<std::size_t>(length_ - 1 - p)] = '1';
  return s;
}

int hamming(const BitCode& a, const BitCode& b) {
  if (a.length() != b.length())
    throw std::invalid_argument("hamming: code lengths differ (" + std::to_string(a.length()) + " vs " +
                                std::to_string(b.length()) + ")");
  return std::popcount(a.bits() ^ b.bits());
}

std::uint64_t ball_size(int length, int radius) {
  if (radius < 0 || radius > length) throw std::invalid_argument("radius must lie in [0, l]");
  unsigned __int128 total = 0;
  unsigned __int128 binom = 1;  // C(l, i)
  for (int i = 0; i <= radius; ++i) {
    total += binom;
    binom = binom * static_cast<unsigned>(length - i) / static_cast<unsigned>(i + 1);
  }
  if (total > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("ball size exceeds 64 bits");
  return static_cast<std::uint64_t>(total);
}

namespace {

// Largest l-bit mask with d bits set: the top d bits.
std::uint64_t last_mask(int length, int d) { return BitCode::mask(length) ^ BitCode::mask(length - d); }

// Saturating variant used for the probe-vs-scan decision.
std::uint64_t ball_size_saturating(int length, int radius) {
  try {
    return ball_size(length, radius);
  } catch (const std::overflow_error&) {
    return std::numeric_limits<std::uint64_t>::max();
  }
}

}  // namespace

HammingBall::HammingBall(BitCode center, int radius) : center_(center), radius_(radius) {
  if (radius < 0 || radius > center.length())
    throw std::invalid_argument("ball radius must lie in [0, l], got " + std::to_string(radius));
}

HammingBall::iterator::iterator(BitCode center, int radius)
    : center_(center), radius_(radius), distance_(0), flips_(0), done_(false) {}

HammingBall::iterator& HammingBall::iterator::operator++() {
  if (done_) return *this;
  if (flips_ == last_mask(center_.length(), distance_)) {
    if (distance_ == radius_) {
      done_ = true;
      return *this;
    }
    ++distance_;
    flips_ = BitCode::mask(distance_);
    return *this;
  }
  // Gosper's hack: next larger integer with the same popcount.
  const std::uint64_t v = flips_;
  const std::uint64_t t = v | (v - 1);
  flips_ = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  return *this;
}

void CodeMatrix::push_back(const BitCode& code) {
  if (code.length() != length) throw std::invalid_argument("code length mismatch");
  rows.push_back(code.bits());
}

CodeMatrix CodeMatrix::truncated(int new_length) const {
  if (new_length < 1 || new_length > length) throw std::invalid_argument("cannot truncate to a longer code");
  CodeMatrix out{new_length, rows};
  for (auto& r : out.rows) r &= BitCode::mask(new_length);
  return out;
}

Eigen::MatrixXd CodeMatrix::signed_matrix() const {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), length);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int p = 0; p < length; ++p) y(static_cast<Eigen::Index>(i), p) = ((rows[i] >> p) & 1U) ? 1.0 : -1.0;
  return y;
}

std::size_t CodeMatrix::on_count(int p) const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [p](std::uint64_t r) { return (r >> p) & 1U; }));
}

CodeIndex CodeIndex::build(const CodeMatrix& codes, std::span<const DocId> doc_ids) {
  if (codes.size() != doc_ids.size()) throw std::invalid_argument("codes and doc_ids differ in size");
  if (codes.length < 1 || codes.length > kMaxCodeLength) throw std::invalid_argument("invalid code length");
  std::unordered_set<DocId> seen;
  CodeIndex index;
  index.length_ = codes.length;
  index.size_ = codes.size();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (!seen.insert(doc_ids[i]).second) throw std::invalid_argument("duplicate doc_id in index");
    auto [it, inserted] = index.buckets_.try_emplace(codes.rows[i]);
    if (inserted) index.insertion_codes_.push_back(codes.rows[i]);
    it->second.push_back(doc_ids[i]);
  }
  return index;
}

const std::vector<DocId>* CodeIndex::bucket(std::uint64_t code) const {
  auto it = buckets_.find(code);
  return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<DocId> CodeIndex::query(const BitCode& center, int radius) const {
  if (center.length() != length_) throw std::invalid_argument("query code length differs from the index");
  if (radius < 0 || radius > length_) throw std::invalid_argument("radius must lie in [0, l]");
  std::vector<DocId> out;
  if (ball_size_saturating(length_, radius) < size_) {
    for (const BitCode probe : HammingBall(center, radius))
      if (const auto* b = bucket(probe.bits())) out.insert(out.end(), b->begin(), b->end());
  } else {
    for (const auto& [code, ids] : buckets_)
      if (std::popcount(code ^ center.bits()) <= radius) out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<DocId, int>> CodeIndex::scan(const BitCode& center, int radius) const {
  if (center.length() != length_) throw std::invalid_argument("query code length differs from the index");
  std::vector<std::pair<DocId, int>> out;
  for (const auto& [code, ids] : buckets_) {
    const int d = std::popcount(code ^ center.bits());
    if (d <= radius)
      for (DocId id : ids) out.emplace_back(id, d);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return out;
}

std::vector<std::pair<std::uint64_t, DocId>> CodeIndex::entries() const {
  std::vector<std::uint64_t> codes = insertion_codes_;
  std::sort(codes.begin(), codes.end());
  std::vector<std::pair<std::uint64_t, DocId>> out;
  out.reserve(size_);
  for (auto code : codes)
    for (DocId id : buckets_.at(code)) out.emplace_back(code, id);
  return out;
}

std::vector<std::size_t> CodeIndex::bucket_size_histogram() const {
  std::vector<std::size_t> hist;
  for (const auto& [code, ids] : buckets_) {
    if (hist.size() <= ids.size()) hist.resize(ids.size() + 1, 0);
    ++hist[ids.size()];
  }
  return hist;
}

namespace {

constexpr std::array<char, 8> kIndexMagic = {'S', 'T', 'H', 'I', 'N', 'D', 'E', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

}  // namespace

using detail::get_le;
using detail::put_le;

void write_index(const CodeIndex& index, std::ostream& out) {
  out.write(kIndexMagic.data(), kIndexMagic.size());
  put_le<std::uint32_t>(out, kIndexVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.length()));
  put_le<std::uint64_t>(out, index.size());
  for (const auto& [code, id] : index.entries()) {
    put_le<std::uint64_t>(out, code);
    put_le<std::int64_t>(out, id);
  }
}

CodeIndex read_index(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kIndexMagic) throw ParseError("not an index file", 0);
  if (get_le<std::uint32_t>(in, "index file") != kIndexVersion) throw ParseError("unsupported index version", 0);
  const auto length = static_cast<int>(get_le<std::uint32_t>(in, "index file"));
  const auto n = get_le<std::uint64_t>(in, "index file");
  CodeMatrix codes{length, {}};
  std::vector<DocId> ids;
  codes.rows.reserve(n);
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    codes.push_back(BitCode(get_le<std::uint64_t>(in, "index file"), length));
    ids.push_back(get_le<std::int64_t>(in, "index file"));
  }
  return CodeIndex::build(codes, ids);
}

void write_codes(const CodeMatrix& codes, std::span<const DocId> doc_ids, std::ostream& out) {
  if (codes.size() != doc_ids.size()) throw std::invalid_argument("codes and doc_ids differ in size");
  out << codes.length << ' ' << codes.size() << '\n';
  char hex[17];
  for (std::size_t i = 0; i < codes.size(); ++i) {
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(codes.rows[i]));
    out << doc_ids[i] << ' ' << hex << '\n';
  }
}

CodeMatrix read_codes(std::istream& in, std::vector<DocId>* doc_ids) {
  int length = 0;
  std::size_t n = 0;
  if (!(in >> length >> n)) throw ParseError("missing codes header 'l n'", 1);
  CodeMatrix codes{length, {}};
  for (std::size_t i = 0; i < n; ++i) {
    DocId id = 0;
    std::string hex;
    if (!(in >> id >> hex)) throw ParseError("truncated codes file", i + 2);
    std::uint64_t bits = 0;
    try {
      std::size_t used = 0;
      bits = std::stoull(hex, &used, 16);
      if (used != hex.size()) throw std::invalid_argument(hex);
    } catch (const std::exception&) {
      throw ParseError("malformed code '" + hex + "'", i + 2);
    }
    codes.push_back(BitCode(bits, length));
    if (doc_ids) doc_ids->push_back(id);
  }
  return codes;
}

}  // namespace sth
