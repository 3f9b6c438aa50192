#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

namespace linklife::detail {

// SplitMix64 finalizer; used to derive well-separated substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

// Uniform (0,1) stream. The (x>>11)+0.5 mapping is exact, avoids 0 and 1,
// and does not depend on the standard library's distribution internals, so
// the draw sequence is identical on every platform for a given seed.
class U01Stream {
 public:
  explicit U01Stream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

// Iterates draw slots [0, n) in fixed chunks; each chunk gets its own
// substream so any scheduling of chunks reproduces the same aggregate.
// fn(slot_index, stream) is called once per slot, chunk by chunk.
template <class Fn>
void for_each_chunked_draw(std::int64_t n, std::uint64_t seed,
                           std::int64_t chunk_size, Fn&& fn) {
  for (std::int64_t chunk = 0; chunk * chunk_size < n; ++chunk) {
    U01Stream stream(substream_seed(seed, static_cast<std::uint64_t>(chunk)));
    const std::int64_t lo = chunk * chunk_size;
    const std::int64_t hi = std::min(n, lo + chunk_size);
    for (std::int64_t i = lo; i < hi; ++i) fn(i, stream);
  }
}

inline constexpr std::int64_t default_chunk_size = 1 << 16;

}  // namespace linklife::detail
