#include "smallloss/rng.hpp"

namespace smallloss {

CounterRng CounterRng::stream(std::uint64_t master_seed, std::uint64_t index, Stream id) {
  std::uint64_t key = mix(master_seed ^ 0x6A09E667F3BCC908ULL);
  key = mix(key ^ (index + 0xBB67AE8584CAA73BULL));
  key = mix(key ^ (static_cast<std::uint64_t>(id) * 0x3C6EF372FE94F82BULL));
  return CounterRng(key);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Rejection removes modulo bias.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return x % n;
}

}  // namespace smallloss
