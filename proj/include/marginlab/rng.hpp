#pragma once

#include <cstdint>
#include <random>

namespace marginlab {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the independent stream for one replication.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication) {
  return mix64(mix64(seed) ^ mix64(replication + 0x632BE59BD9B4E019ULL));
}

// Platform-independent random stream. Only the raw 64-bit engine output is
// used; std distributions differ between standard libraries.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replication) : engine_(stream_seed(seed, replication)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace marginlab
