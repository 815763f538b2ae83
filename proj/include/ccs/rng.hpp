#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ccs {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so streams can be replayed independently
// of each other and of thread scheduling.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : base_(splitmix64(seed ^ splitmix64(stream * 0xd1342543de82ef95ull))) {}

  uint64_t next_u64() { return splitmix64(base_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  // uniform in [0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound), rejection sampled to stay exact
  uint64_t next_below(uint64_t bound) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // standard normal, Box-Muller; consumes exactly two draws
  double next_gaussian() {
    double u1 = (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    double u2 = double(next_u64() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t base_;
  uint64_t counter_ = 0;
};

// Stream ids keep unrelated draws decoupled even under equal seeds.
namespace rng_stream {
inline constexpr uint64_t kRowSampling = 0x524f5753;  // + block index
inline constexpr uint64_t kPayload = 0x5041594c;
inline constexpr uint64_t kNoise = 0x4e4f4953;
}  // namespace rng_stream

}  // namespace ccs
