#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "sth/common.hpp"

namespace sth {

inline constexpr int kMaxCodeLength = 64;

/// An l-bit binary code packed into one 64-bit word. Bit p is stored at the
/// p-th least significant position; a set bit means +1, a clear bit -1.
/// Bits at positions >= length are always zero.
class BitCode {
 public:
  constexpr BitCode() = default;
  BitCode(std::uint64_t bits, int length);

  static constexpr std::uint64_t mask(int length) {
    return length >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int length() const { return length_; }
  constexpr bool bit(int p) const { return (bits_ >> p) & 1U; }
  constexpr int sign(int p) const { return bit(p) ? 1 : -1; }

  BitCode truncated(int length) const;
  BitCode complement() const { return BitCode(~bits_ & mask(length_), length_); }

  /// Bit l-1 first, bit 0 last.
  std::string to_string() const;

  friend constexpr bool operator==(const BitCode&, const BitCode&) = default;

 private:
  std::uint64_t bits_ = 0;
  int length_ = 0;
};

/// Population count of the XOR. Throws std::invalid_argument on length mismatch.
int hamming(const BitCode& a, const BitCode& b);

/// Number of l-bit codes within Hamming distance r: sum_{i<=r} C(l, i).
/// Throws std::invalid_argument when r > l or r < 0, std::overflow_error when
/// the count does not fit 64 bits (l = r = 64).
std::uint64_t ball_size(int length, int radius);

/// Enumerates every code within `radius` of `center`, each once, in ascending
/// distance order; within one distance the flip masks ascend numerically.
class HammingBall {
 public:
  HammingBall(BitCode center, int radius);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = BitCode;
    using difference_type = std::ptrdiff_t;
    using pointer = const BitCode*;
    using reference = BitCode;

    iterator() = default;
    BitCode operator*() const { return BitCode(center_.bits() ^ flips_, center_.length()); }
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.done_ == b.done_ && (a.done_ || (a.distance_ == b.distance_ && a.flips_ == b.flips_));
    }

   private:
    friend class HammingBall;
    iterator(BitCode center, int radius);

    BitCode center_;
    int radius_ = 0;
    int distance_ = 0;
    std::uint64_t flips_ = 0;
    bool done_ = true;
  };

  iterator begin() const { return iterator(center_, radius_); }
  iterator end() const { return {}; }

 private:
  BitCode center_;
  int radius_;
};

/// n codes of a common length, one per row.
struct CodeMatrix {
  int length = 0;
  std::vector<std::uint64_t> rows;

  std::size_t size() const { return rows.size(); }
  BitCode code(std::size_t i) const { return BitCode(rows[i], length); }
  void push_back(const BitCode& code);

  /// Keeps the first `length` bits of every row.
  CodeMatrix truncated(int length) const;

  /// n x l matrix of +-1 entries.
  Eigen::MatrixXd signed_matrix() const;

  /// Number of rows with bit p on.
  std::size_t on_count(int p) const;

  friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;
};

/// Hash table from code to the documents carrying it.
class CodeIndex {
 public:
  CodeIndex() = default;

  /// Buckets keep insertion order. doc_ids must be unique and match codes in size.
  static CodeIndex build(const CodeMatrix& codes, std::span<const DocId> doc_ids);

  int length() const { return length_; }
  std::size_t size() const { return size_; }
  std::size_t bucket_count() const { return buckets_.size(); }
  const std::vector<DocId>* bucket(std::uint64_t code) const;

  /// Sorted doc ids within `radius` of `center`. Probes the ball's buckets
  /// when ball_size < n, otherwise scans every entry; results are identical.
  std::vector<DocId> query(const BitCode& center, int radius) const;

  /// Linear scan returning (doc_id, distance) for every entry within radius,
  /// ordered by distance then doc id.
  std::vector<std::pair<DocId, int>> scan(const BitCode& center, int radius) const;

  /// (code, doc_id) pairs sorted by code, bucket order within a code.
  std::vector<std::pair<std::uint64_t, DocId>> entries() const;

  /// Bucket-size histogram for diagnostics: histogram[s] = buckets of size s.
  std::vector<std::size_t> bucket_size_histogram() const;

 private:
  int length_ = 0;
  std::size_t size_ = 0;
  std::unordered_map<std::uint64_t, std::vector<DocId>> buckets_;
  std::vector<std::uint64_t> insertion_codes_;  // distinct codes in first-seen order
};

// Binary index file, all integers little-endian:
//   magic "STHINDEX" (8 bytes), u32 version = 1, u32 l, u64 n,
//   then n records (u64 code, i64 doc_id) sorted by code, ties in bucket order.
void write_index(const CodeIndex& index, std::ostream& out);
CodeIndex read_index(std::istream& in);

// Code matrix text file: header "l n", then one "doc_id hex" line per row.
void write_codes(const CodeMatrix& codes, std::span<const DocId> doc_ids, std::ostream& out);
CodeMatrix read_codes(std::istream& in, std::vector<DocId>* doc_ids = nullptr);

}  // namespace sth
