#pragma once

#include "anigreen/coords.hpp"

#include <string>
#include <variant>

namespace anigreen {

// 16-byte header: "AGC", dim byte, then u32 n_points, n_vertices, n_faces;
// body: points, phi, psi as little-endian row-major doubles.
inline constexpr std::size_t kTableHeaderBytes = 16;

template <int D>
std::string encode_table(const CoordinateTable<D>& table);

using AnyTable = std::variant<CoordinateTable<2>, CoordinateTable<3>>;

/// Throws ParseError on a bad magic, dimension or size.
AnyTable decode_table(const std::string& bytes);

template <int D>
void write_table(const std::string& path, const CoordinateTable<D>& table);
AnyTable read_table(const std::string& path);

}  // namespace anigreen
