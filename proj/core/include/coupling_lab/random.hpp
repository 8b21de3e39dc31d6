#pragma once

// Counter-based random streams (Philox4x32-10) and the handful of variate
// generators the samplers need. Everything here is implemented locally so
// that draws are bit-identical across standard libraries.

#include <array>
#include <cstdint>
#include <limits>

namespace coupling_lab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x);

/// A reproducible stream addressed by (root seed, experiment id, replicate).
/// Distinct addresses select disjoint Philox counter ranges or keys, so
/// streams never overlap; the same address replays the same draws.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t experiment_id, std::uint64_t replicate);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (buffered_ == 0) refill();
    --buffered_;
    ++draws_;
    return buffer_[buffered_];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();
  double exponential();
  /// Gamma(shape, rate 1).
  double gamma(double shape);
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t experiment_id() const { return experiment_id_; }
  std::uint64_t replicate() const { return replicate_; }
  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::uint64_t seed_, experiment_id_, replicate_;
  PhiloxKey key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::uint64_t draws_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace coupling_lab
