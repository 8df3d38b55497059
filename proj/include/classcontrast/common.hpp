/*
 * common.hpp -- shared error types, deterministic RNG, sub-seed derivation.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace classcontrast {

// Bad caller input (node ids, fractions, dimensions).
struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (recipe vs graph, dimension mismatch).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken input data (parse failures, bad weights, duplicate ids).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64, used both as a standalone generator and to derive
// independent sub-seeds from (run seed, stage tag).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stage tags keep the split / landmark / sampling / init streams independent
// so each stage is reproducible on its own.
inline std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& stage_tag) {
  std::uint64_t s = run_seed ^ fnv1a(stage_tag);
  return splitmix64(s);
}

// Deterministic PRNG with an implementation-pinned bounded draw and shuffle.
// std::uniform_int_distribution is implementation-defined, so we avoid it
// anywhere reproducibility is part of the contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // unbiased draw in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw argument_error("Rng::next_below: bound must be > 0");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // symmetric uniform in [-range, range]
  double next_symmetric(double range) {
    return (2.0 * next_double() - 1.0) * range;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace classcontrast
