#ifndef GDF_RNG_HPP
#define GDF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace gdf {

// Counter-based random stream: each draw is a stateless mix of
// (key, counter), so a stream is fully determined by (master seed, stream id)
// and streams can be assigned to parallel workers without coordination.
// The mixer is the splitmix64 finalizer.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream)
      : key_(mix(mix(master_seed) ^ mix(stream ^ 0x6a09e667f3bcc909ull))) {}

  std::uint64_t next_u64() { return mix(key_ ^ (counter_++ * 0xd1342543de82ef95ull)); }

  // Uniform on (0,1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

  // Draws an index from a cumulative distribution whose last entry is 1.
  int next_categorical(const std::vector<double>& cdf) {
    const double u = next_unit();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (cdf[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gdf

#endif  // GDF_RNG_HPP
