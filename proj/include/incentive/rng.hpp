#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace incentive {

// Counter-based seeding: every (master seed, stream, trial) triple owns an
// independent generator, so adding an agent or changing the worker count
// never shifts the draws seen by anyone else.
std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t trial);

// Stream ids used by world sampling. Agent i draws its noise on stream i.
inline constexpr std::uint64_t kWorldStream = 0xF00DF00DF00DULL;
inline constexpr std::uint64_t kHonestStream = 0xBEEFBEEFBEEFULL;

// SplitMix64 engine; satisfies UniformRandomBitGenerator.
class Substream {
 public:
  using result_type = std::uint64_t;

  explicit Substream(std::uint64_t state) : state_(state) {}
  Substream(std::uint64_t master, std::uint64_t stream, std::uint64_t trial)
      : state_(derive_seed(master, stream, trial)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(*this);
  }

 private:
  std::uint64_t state_;
};

}  // namespace incentive
