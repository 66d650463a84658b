#ifndef DIPLOID_RNG_HPP
#define DIPLOID_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace diploid {

// Finalizer from the splitmix64 generator; used both to seed the main
// generator and to derive independent per-replica stream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state;

  explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
  }
};

// xoshiro256++ (Blackman & Vigna).  Chosen over std engines because the
// stream must be bit-reproducible across platforms and standard library
// versions; distributions are built from the raw bits below for the same
// reason.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

// Independent stream for one replica of a batch.  Replica i of a run with
// base seed s always sees the same stream, regardless of how many replicas
// run or in what order they are scheduled.
inline Xoshiro256pp replica_stream(std::uint64_t base_seed,
                                   std::uint64_t replica) {
  return Xoshiro256pp(mix64(base_seed + 0x9e3779b97f4a7c15ULL * (replica + 1)));
}

}  // namespace diploid

#endif
