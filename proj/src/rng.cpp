#include "incentive/rng.hpp"

namespace incentive {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t trial) {
  std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (stream + 0xD1B54A32D192ED03ULL));
  h = mix64(h ^ (trial + 0x8CB92BA72F3D8DD7ULL));
  return h;
}

}  // namespace incentive
