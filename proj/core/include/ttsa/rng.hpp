#pragma once

#include <cstdint>

#include "ttsa/linalg.hpp"

namespace ttsa {

// Counter-based pseudo-random stream (SplitMix64 core).
//
// Design goals, in order:
//   1. Bit-reproducibility across platforms and compilers.  Every draw is a
//      fixed sequence of integer operations; the gaussian transform never
//      caches state, so interleaving draw types cannot shift later draws.
//   2. Cheap, well-separated substreams: split() derives an independent child
//      stream, and nearby integer seeds produce decorrelated streams because
//      every output passes through the full 64-bit finalizer.
//
// This is not a cryptographic generator; it is a simulation RNG with 64-bit
// state and period 2^64 per stream, which is ample for the experiment sizes
// handled here.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double();

  // Standard normal via Box-Muller; consumes exactly two u64 draws and keeps
  // no cached spare, so the draw count per call is constant.
  double next_gaussian();

  // Uniform on {0, 1, ..., n-1}; n >= 1.
  std::uint32_t next_below(std::uint32_t n);

  // +1 or -1 with equal probability (one u64 draw).
  double next_sign();

  // Independent child stream; advances this stream by one draw.
  RngStream split();

  // Vector of i.i.d. standard normals.
  Vec gaussian_vec(Index n);

 private:
  std::uint64_t state_;
};

}  // namespace ttsa
