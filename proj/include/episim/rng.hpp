#pragma once

// Counter-based random numbers (Philox4x64-10).
//
// Every random quantity in the library is addressed by
//   key     = (seed, stream)
//   counter = (index, 0, domain, 0)
// so draws never depend on thread scheduling or platform generators.
// Stream splitting: replicate k of a batch uses stream k under the batch
// seed; sweeps use stream (size_index << 32 | replicate).  Domains separate
// independent uses inside one stream (see `Domain`).

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace episim {

enum class Domain : std::uint64_t {
  general = 0,
  edge_clock = 1,  // keyed by directed edge slot
  external = 2,    // engine external-hit stream
  policy = 3,      // policy-internal randomness
  bootstrap = 4,
  graph = 5,
};

class Philox4x64 {
 public:
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr Block generate(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const auto [hi0, lo0] = mul128(kM0, ctr[0]);
      const auto [hi1, lo1] = mul128(kM1, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

  struct Wide {
    std::uint64_t hi, lo;
  };
  static constexpr Wide mul128(std::uint64_t a, std::uint64_t b) noexcept {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
  }
};

// Maps 64 random bits to (0, 1]; never returns 0 so log() is finite.
inline double bits_to_unit(std::uint64_t x) noexcept {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double bits_to_exponential(std::uint64_t x, double rate) noexcept {
  return -std::log(bits_to_unit(x)) / rate;
}

// Single keyed draw: the value depends only on (seed, stream, domain, index).
inline std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t stream, Domain domain,
                                std::uint64_t index) noexcept {
  return Philox4x64::generate({index, 0, static_cast<std::uint64_t>(domain), 0},
                              {seed, stream})[0];
}

// Sequential generator over one (seed, stream, domain) lane.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t stream, Domain domain = Domain::general)
      : key_{seed, stream}, domain_(static_cast<std::uint64_t>(domain)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      block_ = Philox4x64::generate({counter_++, 0, domain_, 0}, key_);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  // Uniform on (0, 1].
  double uniform() noexcept { return bits_to_unit((*this)()); }

  double exponential(double rate) noexcept { return bits_to_exponential((*this)(), rate); }

  // Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream() const noexcept { return key_[1]; }

 private:
  Philox4x64::Key key_{0, 0};
  std::uint64_t domain_ = 0;
  std::uint64_t counter_ = 0;
  Philox4x64::Block block_{};
  int pos_ = 4;
};

// Stream id for replicate `replicate` of sweep point `size_index`.
constexpr std::uint64_t sweep_stream(std::uint64_t size_index, std::uint64_t replicate) noexcept {
  return (size_index << 32) | (replicate & 0xffffffffULL);
}

// Derives an independent 64-bit seed from (master, tag).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) noexcept {
  return Philox4x64::generate({tag, 0, 0xD5EEDULL, 0}, {master, 0})[0];
}

}  // namespace episim
