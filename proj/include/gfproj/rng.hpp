#pragma once

#include "gfproj/common.hpp"

#include <cstdint>
#include <random>

namespace gfproj {

// Seedable generator with deterministic child streams. A child stream depends
// only on (seed, stream id), never on how many draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t stream) const;

  double uniform();  // [0, 1)
  double normal();
  bool bernoulli(double p);
  std::size_t index(std::size_t n);  // uniform on {0, ..., n-1}
  Matrix normal_matrix(Index rows, Index cols);
  Vector normal_vector(Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gfproj
