#pragma once

#include <cstdint>

namespace mixppl {

std::uint64_t splitmix64(std::uint64_t x);

// PCG32. Implemented here rather than via <random> so that streams are
// reproducible across platforms and standard-library versions.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t init_state, std::uint64_t init_seq);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  // Uniform in {0, ..., bound-1}, unbiased. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Independent substream for one unit of work (sample index, particle slot,
// resampling step, ...). Parallel and serial schedules draw identical
// numbers because every unit owns its own stream.
Rng substream(std::uint64_t seed, std::uint64_t unit);

}  // namespace mixppl
