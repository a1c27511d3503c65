#ifndef WTSK_RNG_HPP
#define WTSK_RNG_HPP

#include <cstdint>

namespace wtsk {

// splitmix64; used both as a generator step and as a seed mixer so that
// (seed, stage, unit) substreams are portable and order-independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stage,
                                    std::uint64_t unit) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stage) ^ unit);
}

struct SmallRng {
  std::uint64_t s;
  explicit SmallRng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() { return s = splitmix64(s); }
  // 53-bit uniform in [0,1)
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  long below_long(long n) {
    return static_cast<long>(next() % static_cast<std::uint64_t>(n));
  }
  // inverse-CDF draw from an (almost) normalized row of length len
  int sample_row(const double* w, int len) {
    double total = 0.0;
    for (int i = 0; i < len; ++i) total += w[i];
    double u = u01() * total;
    double acc = 0.0;
    for (int i = 0; i < len - 1; ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return len - 1;
  }
};

}  // namespace wtsk

#endif
