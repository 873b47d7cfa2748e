#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace sth {

/// Portable pseudorandom source.
///
/// Every derived quantity is defined here on top of the raw 64-bit output of
/// std::mt19937_64 (whose sequence the C++ standard pins down), so streams are
/// reproducible across standard libraries:
///   uniform01()      = (next() >> 11) * 2^-53, in [0, 1)
///   uniform_index(n) = Lemire's multiply-shift with rejection, unbiased in [0, n)
///   normal()         = Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one
///                      draw per call (the sine partner is discarded)
///   shuffle()        = Fisher-Yates from the back using uniform_index
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Seed for an independent named stream derived from a master seed.
  static std::uint64_t substream(std::uint64_t seed, std::string_view name);

  std::uint64_t next() { return engine_(); }
  double uniform01();
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sth
