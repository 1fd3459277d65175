#include "mixppl/rng.hpp"

namespace mixppl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t init_state, std::uint64_t init_seq) {
  state_ = 0;
  inc_ = (init_seq << 1u) | 1u;
  next_u32();
  state_ += init_state;
  next_u32();
}

std::uint32_t Rng::next_u32() {
  std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  std::uint32_t xorshifted =
      static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t Rng::next_u64() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  // rejection sampling over the top of the range to avoid modulo bias
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

Rng substream(std::uint64_t seed, std::uint64_t unit) {
  std::uint64_t s = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  std::uint64_t u = splitmix64(unit + 0x14057b7ef767814fULL);
  return Rng(splitmix64(s + u), splitmix64(s ^ (u * 0xda942042e4dd58b5ULL)));
}

}  // namespace mixppl
