#include "graphexon/common.hpp"

#include <cmath>

namespace graphexon {

double counter_normal(std::uint64_t seed, std::uint64_t agent, std::uint64_t step) {
  std::uint64_t s = mix64(seed ^ 0x243f6a8885a308d3ULL);
  s = mix64(s ^ agent);
  s = mix64(s ^ step);
  // two uniforms; u1 in (0,1] so the log is finite
  double u1 = (static_cast<double>(s >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(mix64(s ^ 0x13198a2e03707344ULL) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace graphexon
