#include "bsq/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace bsq {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'S', 'Q', 'F'};

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(std::ostream& out, const RealField& field) {
  const int n = field.grid().n();
  std::vector<unsigned char> buf;
  buf.reserve(16 + 8 * static_cast<std::size_t>(n) * n);
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(buf, kSnapshotVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(n));
  put_le<std::uint32_t>(buf, 0u);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) put_le<double>(buf, field(a, b));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_snapshot: stream write failed");
}

void write_snapshot(const std::filesystem::path& path, const RealField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
  write_snapshot(out, field);
}

RealField read_snapshot(std::istream& in) {
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != 16) throw ContractViolation("read_snapshot: truncated header");
  if (std::memcmp(header.data(), kMagic.data(), 4) != 0) {
    throw ContractViolation("read_snapshot: bad magic");
  }
  const auto version = get_le<std::uint32_t>(header.data() + 4);
  if (version != kSnapshotVersion) throw ContractViolation("read_snapshot: unsupported version");
  const auto n = static_cast<int>(get_le<std::uint32_t>(header.data() + 8));
  const Grid grid(n);
  std::vector<unsigned char> body(8 * static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (static_cast<std::size_t>(in.gcount()) != body.size()) {
    throw ContractViolation("read_snapshot: truncated body");
  }
  RealArray samples(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      samples(a, b) = get_le<double>(body.data() + 8 * (static_cast<std::size_t>(a) * n + b));
    }
  }
  return RealField(grid, std::move(samples));
}

RealField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace bsq
