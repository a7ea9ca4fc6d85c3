#include "ttsa/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ttsa {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  // Strictly positive uniform for the log: map the 53-bit draw to (0, 1].
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint32_t RngStream::next_below(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::next_below: n must be >= 1");
  // Fixed-point multiply maps the 64-bit draw onto {0,...,n-1}; the residual
  // bias is n / 2^64, far below anything observable at our sample sizes.
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::next_sign() {
  return (next_u64() & 1ULL) ? 1.0 : -1.0;
}

RngStream RngStream::split() {
  return RngStream(next_u64() ^ 0x5851F42D4C957F2DULL);
}

Vec RngStream::gaussian_vec(Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = next_gaussian();
  return v;
}

}  // namespace ttsa
