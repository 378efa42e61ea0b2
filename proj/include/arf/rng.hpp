#pragma once

#include <cstdint>

namespace arf {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_key(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
  uint64_t h = splitmix64(a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  h = splitmix64(h ^ d);
  return h;
}

// PCG32 (Melissa O'Neill, pcg-random.org), minimal variant. Deterministic
// everywhere, cheap to seed per (seed, frame, pixel) stream.
struct Pcg32 {
  uint64_t state = 0x853c49e6748fea9bULL;
  uint64_t inc = 0xda3e39cb94b95bdbULL;

  Pcg32() = default;
  Pcg32(uint64_t seed, uint64_t sequence) { reseed(seed, sequence); }

  void reseed(uint64_t seed, uint64_t sequence) {
    state = 0;
    inc = (sequence << 1u) | 1u;
    next_u32();
    state += seed;
    next_u32();
  }

  uint32_t next_u32() {
    const uint64_t old = state;
    state = old * 6364136223846793005ULL + inc;
    const uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    const uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // Uniform in [0, 1).
  double next_double() { return next_u32() * 0x1p-32; }
  float next_float() { return (next_u32() >> 8) * 0x1p-24f; }

  // Uniform integer in [0, n), n > 0. Bounded without modulo bias is not
  // needed at these scales; plain scaling keeps draws cheap and deterministic.
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

// Stream keyed by up to three ids (frame, pixel, step, ...).
inline Pcg32 keyed_rng(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  return Pcg32(mix_key(seed, a, b), mix_key(c, a ^ 0x5851f42d4c957f2dULL, seed));
}

}  // namespace arf
