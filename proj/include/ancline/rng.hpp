#pragma once

// Reproducible random streams.  Each (seed, stream index) pair gets an independent
// xoshiro256** state expanded by SplitMix64, so replicates can run in any order (or
// concurrently) and still give bit-identical results.  Variates are produced by hand rather than
// by <random> distributions, whose output is implementation-defined.

#include <bit>
#include <cmath>
#include <cstdint>

namespace ancline {

class Splitmix64 {
 public:
  explicit Splitmix64(std::uint64_t seed) : state_{seed} {}

  auto operator()() -> std::uint64_t {
    auto z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream) {
    // Mix the stream index through a second SplitMix64 so nearby (seed, stream) pairs diverge.
    auto mixer = Splitmix64{stream ^ 0x6a09e667f3bcc909ULL};
    auto sm = Splitmix64{seed ^ mixer()};
    for (auto& x : s_) { x = sm(); }
  }

  static constexpr auto min() -> result_type { return 0; }
  static constexpr auto max() -> result_type { return ~result_type{0}; }

  auto operator()() -> result_type {
    auto result = std::rotl(s_[1] * 5, 7) * 9;
    auto t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  auto uniform() -> double { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Exp(rate)
  auto exponential(double rate) -> double { return -std::log1p(-uniform()) / rate; }

  // uniform on {0, ..., n-1}; Lemire's nearly-divisionless method
  auto below(std::uint64_t n) -> std::uint64_t {
    auto x = (*this)();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      auto threshold = (0 - n) % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  auto bernoulli(double p) -> bool { return uniform() < p; }

 private:
  std::uint64_t s_[4];
};

}  // namespace ancline
