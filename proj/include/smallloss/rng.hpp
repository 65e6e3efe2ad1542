#pragma once

#include <cstdint>
#include <limits>

#include <boost/random/exponential_distribution.hpp>

namespace smallloss {

// Named sub-streams so environment randomness, learner draws and FPL
// perturbations never share state.
enum class Stream : std::uint64_t {
  Environment = 1,
  Instance = 2,
  LearnerDraws = 3,
  Perturbations = 4,
  Trials = 5,
};

// Counter-based generator: the i-th output is a pure function of (key, i),
// so streams keyed by (master seed, index, stream id) are reproducible and
// independent of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static CounterRng stream(std::uint64_t master_seed, std::uint64_t index, Stream id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Standard exponential variate. Boost's ziggurat is header-only code, so
  // the sequence depends only on this engine (unlike std:: distributions).
  double exponential() { return boost::random::exponential_distribution<double>(1.0)(*this); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace smallloss
