#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "shearlet/error.hpp"

namespace shearlet::detail {

static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(Errc::io, "truncated binary stream");
  return value;
}

inline void put_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4] = {};
  in.read(buf, 4);
  if (!in || buf[0] != magic[0] || buf[1] != magic[1] || buf[2] != magic[2] || buf[3] != magic[3])
    throw Error(Errc::io, std::string("bad magic, expected ") + magic);
}

}  // namespace shearlet::detail
