#include "bpdl/rng.hpp"

#include <array>

namespace bpdl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::array<std::uint32_t, 4> words{};
  std::uint64_t a = mix64(seed);
  std::uint64_t b = mix64(a);
  words[0] = static_cast<std::uint32_t>(a);
  words[1] = static_cast<std::uint32_t>(a >> 32);
  words[2] = static_cast<std::uint32_t>(b);
  words[3] = static_cast<std::uint32_t>(b >> 32);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return Rng(mix64(master_seed) ^ mix64(~stream_id + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

}  // namespace bpdl
