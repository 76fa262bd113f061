#ifndef GFPROC_RNG_HPP_
#define GFPROC_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace gfproc {

inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. Each worker owns one stream;
// streams are derived from (master seed, a-index, replicate index) so the
// result of a replicate does not depend on which worker ran it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
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

  // uniform on (0,1); never returns 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (one value per pair of uniforms)
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Order-independent replicate seeding: hash the coordinates together.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a_index,
                                 std::uint64_t replicate) {
  std::uint64_t h = master ^ 0x6a09e667f3bcc908ULL;
  h ^= splitmix64(a_index);
  std::uint64_t mix = h + 0x3c6ef372fe94f82bULL * (replicate + 1);
  std::uint64_t out = splitmix64(mix);
  return out ^ splitmix64(h);
}

}  // namespace gfproc

#endif  // GFPROC_RNG_HPP_
