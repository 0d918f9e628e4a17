#pragma once

#include <cstdint>
#include <limits>

namespace wpcn {

/// Counter-based generator: output i of stream (key, stream) is a fixed hash
/// of (key, stream, i). Independent substreams need no shared state, so
/// trials can be evaluated in any order or in parallel with identical draws.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key = 0, std::uint64_t stream = 0)
      : key_(mix(key ^ 0x243f6a8885a308d3ULL)), stream_(mix(stream + 0x13198a2e03707344ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return mix(key_ ^ mix(stream_ + 0x9e3779b97f4a7c15ULL * ++counter_));
  }

  /// Generator for substream `stream` under the same key.
  CounterRng substream(std::uint64_t stream) const {
    CounterRng r;
    r.key_ = key_;
    r.stream_ = mix(stream_ ^ mix(stream + 0xa4093822299f31d0ULL));
    return r;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace wpcn
