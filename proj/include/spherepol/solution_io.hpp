#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "spherepol/coeff.hpp"

namespace spherepol {

// Flat binary layout, all fields little-endian:
//   bytes 0-7   magic "SPHPOLv\0"
//   u32         format version (1)
//   u64         number of spheres N
//   u32         lmax
//   u8          space (0 full, 1 reduced)
//   u8          representation (0 expansion, 1 projection)
//   u16         reserved, zero
//   f64 * len   values in (sphere, l, m) order
inline constexpr std::uint32_t kSolutionFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_solution(const std::string& path, const CoeffVector& x);
CoeffVector read_solution(const std::string& path);

}  // namespace spherepol
