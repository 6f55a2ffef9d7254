#pragma once

// Field snapshots. Binary layout, little endian:
//   0  "CRKF"
//   4  u32 n, u32 N, u32 channels
//   16 f64 L
//   24 8 reserved bytes
//   32 f64 values, channel-major, axis 0 slowest
// CSV export writes one row per point of a 1D field or of the 2D slice
// through the box centre.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "crk/error.hpp"
#include "crk/grid.hpp"

namespace crk {

namespace detail {

static_assert(std::endian::native == std::endian::little, "field snapshots assume a little-endian host");

template <class T>
void put(std::vector<char>& out, std::size_t offset, T value) {
  std::memcpy(out.data() + offset, &value, sizeof(T));
}

template <class T>
T get(const char* in) {
  T v;
  std::memcpy(&v, in, sizeof(T));
  return v;
}

}  // namespace detail

constexpr std::size_t kFieldHeaderSize = 32;

inline std::vector<char> encode_field(const Field& u) {
  const auto values = u.values();
  std::vector<char> out(kFieldHeaderSize + values.size() * sizeof(double), 0);
  std::memcpy(out.data(), "CRKF", 4);
  detail::put<std::uint32_t>(out, 4, static_cast<std::uint32_t>(u.grid().n()));
  detail::put<std::uint32_t>(out, 8, static_cast<std::uint32_t>(u.grid().points()));
  detail::put<std::uint32_t>(out, 12, static_cast<std::uint32_t>(u.channels()));
  detail::put<double>(out, 16, u.grid().length());
  std::memcpy(out.data() + kFieldHeaderSize, values.data(), values.size() * sizeof(double));
  return out;
}

inline Field decode_field(const std::vector<char>& bytes) {
  if (bytes.size() < kFieldHeaderSize || std::memcmp(bytes.data(), "CRKF", 4) != 0)
    throw ParseError("byte 0", "not a field snapshot (bad magic)");
  const auto n = detail::get<std::uint32_t>(bytes.data() + 4);
  const auto points = detail::get<std::uint32_t>(bytes.data() + 8);
  const auto channels = detail::get<std::uint32_t>(bytes.data() + 12);
  const auto length = detail::get<double>(bytes.data() + 16);
  if (n < 1 || n > 8 || channels < 1) throw ParseError("byte 4", "implausible snapshot header");
  Field u(Grid(static_cast<int>(n), static_cast<int>(points), length), static_cast<int>(channels));
  const std::size_t expected = kFieldHeaderSize + u.values().size() * sizeof(double);
  if (bytes.size() != expected)
    throw ParseError("byte 32", "snapshot has " + std::to_string(bytes.size()) + " bytes, expected " +
                                           std::to_string(expected));
  std::memcpy(u.values().data(), bytes.data() + kFieldHeaderSize, u.values().size() * sizeof(double));
  return u;
}

inline void write_field(const std::string& path, const Field& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  const auto bytes = encode_field(u);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

inline Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

/// Columns x (and y), then c0..c{m-1}. For n >= 3 the slice fixes the
/// trailing axes at the box centre.
inline void write_field_csv(std::ostream& out, const Field& u) {
  const Grid& g = u.grid();
  const int n = g.n();
  const auto center = g.center();
  out << "x";
  if (n >= 2) out << ",y";
  for (int c = 0; c < u.channels(); ++c) out << ",c" << c;
  out << "\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const int rows = g.points();
  const int cols = n >= 2 ? g.points() : 1;
  std::vector<int> m(center.begin(), center.end());
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      m[0] = a;
      if (n >= 2) m[1] = b;
      const std::size_t i = g.ravel(m);
      out << num(g.coordinate(a));
      if (n >= 2) out << "," << num(g.coordinate(b));
      for (int c = 0; c < u.channels(); ++c) out << "," << num(u.at(c, i));
      out << "\n";
    }
}

}  // namespace crk
