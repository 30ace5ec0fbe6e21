#include "anigreen/table_cache.hpp"

#include "anigreen/error.hpp"
#include "anigreen/obj_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

namespace anigreen {

namespace {

template <typename T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::ParseError, "table cache truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

template <int D>
CoordinateTable<D> decode_body(const std::string& in, std::size_t pos, std::size_t np, std::size_t nv, std::size_t nf) {
  const std::size_t need = kTableHeaderBytes + sizeof(double) * (np * D + np * nv + np * nf);
  if (in.size() != need)
    throw Error(ErrorCode::ParseError, "table cache size " + std::to_string(in.size()) + " does not match header (" +
                                           std::to_string(need) + ")");
  CoordinateTable<D> t;
  t.points.resize(np);
  for (auto& p : t.points)
    for (int k = 0; k < D; ++k) p(k) = get<double>(in, pos);
  t.phi.resize(np, nv);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < nv; ++j) t.phi(i, j) = get<double>(in, pos);
  t.psi.resize(np, nf);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < nf; ++j) t.psi(i, j) = get<double>(in, pos);
  return t;
}

}  // namespace

template <int D>
std::string encode_table(const CoordinateTable<D>& t) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (t.points.size() > kMax || std::size_t(t.phi.cols()) > kMax || std::size_t(t.psi.cols()) > kMax)
    throw Error(ErrorCode::InvalidArgument, "table too large for the cache format");
  std::string out = "AGC";
  out.push_back(char(D));
  put<std::uint32_t>(out, std::uint32_t(t.points.size()));
  put<std::uint32_t>(out, std::uint32_t(t.phi.cols()));
  put<std::uint32_t>(out, std::uint32_t(t.psi.cols()));
  out.reserve(out.size() + sizeof(double) * t.points.size() * (D + t.phi.cols() + t.psi.cols()));
  for (const auto& p : t.points)
    for (int k = 0; k < D; ++k) put<double>(out, p(k));
  for (Eigen::Index i = 0; i < t.phi.rows(); ++i)
    for (Eigen::Index j = 0; j < t.phi.cols(); ++j) put<double>(out, t.phi(i, j));
  for (Eigen::Index i = 0; i < t.psi.rows(); ++i)
    for (Eigen::Index j = 0; j < t.psi.cols(); ++j) put<double>(out, t.psi(i, j));
  return out;
}

AnyTable decode_table(const std::string& in) {
  if (in.size() < kTableHeaderBytes || in.compare(0, 3, "AGC") != 0)
    throw Error(ErrorCode::ParseError, "not a table cache (bad magic)");
  const int dim = static_cast<unsigned char>(in[3]);
  std::size_t pos = 4;
  std::size_t np = get<std::uint32_t>(in, pos);
  std::size_t nv = get<std::uint32_t>(in, pos);
  std::size_t nf = get<std::uint32_t>(in, pos);
  if (dim == 2) return decode_body<2>(in, pos, np, nv, nf);
  if (dim == 3) return decode_body<3>(in, pos, np, nv, nf);
  throw Error(ErrorCode::ParseError, "table cache has unsupported dimension " + std::to_string(dim));
}

template <int D>
void write_table(const std::string& path, const CoordinateTable<D>& table) {
  write_text_file(path, encode_table(table));
}

AnyTable read_table(const std::string& path) { return decode_table(read_text_file(path)); }

template std::string encode_table(const CoordinateTable<2>&);
template std::string encode_table(const CoordinateTable<3>&);
template void write_table(const std::string&, const CoordinateTable<2>&);
template void write_table(const std::string&, const CoordinateTable<3>&);

}  // namespace anigreen
