#include "spherepol/solution_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace spherepol {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'P', 'H', 'P', 'O', 'L', 'v', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw FormatError("truncated solution file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace

void write_solution(const std::string& path, const CoeffVector& x) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kSolutionFormatVersion);
  put<std::uint64_t>(os, x.spheres());
  put<std::uint32_t>(os, std::uint32_t(x.lmax()));
  put<std::uint8_t>(os, x.space() == Space::Full ? 0 : 1);
  put<std::uint8_t>(os, x.representation() == Representation::Expansion ? 0 : 1);
  put<std::uint16_t>(os, 0);
  for (double v : x.values()) put<double>(os, v);
  if (!os) throw std::runtime_error("write failed for " + path);
}

CoeffVector read_solution(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::array<char, 8> magic;
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError(path + ": not a solution file");
  auto version = get<std::uint32_t>(is);
  if (version != kSolutionFormatVersion) throw FormatError(path + ": unsupported version " + std::to_string(version));
  auto n = get<std::uint64_t>(is);
  auto lmax = get<std::uint32_t>(is);
  auto space = get<std::uint8_t>(is);
  auto rep = get<std::uint8_t>(is);
  get<std::uint16_t>(is);
  if (space > 1 || rep > 1 || lmax > std::uint32_t(kMaxDegree)) throw FormatError(path + ": bad header");
  CoeffVector x(n, int(lmax), space == 0 ? Space::Full : Space::Reduced,
                rep == 0 ? Representation::Expansion : Representation::Projection);
  for (double& v : x.values()) v = get<double>(is);
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError(path + ": trailing data");
  return x;
}

}  // namespace spherepol
