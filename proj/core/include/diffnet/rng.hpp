#pragma once

#include <cstdint>

namespace diffnet {

// Seedable pseudo-random stream (xoshiro256++ seeded from a splitmix64 hash of
// the pair (master_seed, stream_id)).
//
// The same (master_seed, stream_id) always replays the identical draw
// sequence, independent of which thread consumes it, so parallel Monte Carlo
// loops stay reproducible by giving each unit of work its own stream.
// Normal variates use the inverse-CDF transform, keeping the sequence a pure
// function of the uniform bits.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on the open interval (0, 1); safe as a quantile-function input.
  double uniform_open();

  // Standard normal draw via norm_ppf(uniform_open()).
  double normal();

  // Deterministic child stream for the given key. Children with distinct keys
  // (or from distinct parents) behave as independent streams.
  RngStream derive(std::uint64_t key) const;

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::uint64_t state_[4];
};

}  // namespace diffnet
