#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "sth/common.hpp"

namespace sth::detail {

template <typename T>
struct bits_of {
  using type = std::make_unsigned_t<T>;
};
template <>
struct bits_of<double> {
  using type = std::uint64_t;
};

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = typename bits_of<T>::type;
  static_assert(sizeof(U) == sizeof(T));
  U u;
  if constexpr (std::is_floating_point_v<T>) {
    u = std::bit_cast<U>(value);
  } else {
    u = static_cast<U>(value);
  }
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t b = 0; b < sizeof(T); ++b) bytes[b] = static_cast<unsigned char>(u >> (8 * b));
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  using U = typename bits_of<T>::type;
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw ParseError(std::string("truncated ") + what, 0);
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(bytes[b]) << (8 * b);
  if constexpr (std::is_floating_point_v<T>) {
    return std::bit_cast<T>(u);
  } else {
    return static_cast<T>(u);
  }
}

}  // namespace sth::detail
