#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace bmc {

inline constexpr std::uint64_t
splitmix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Seed of replication `index` under `master`.
inline constexpr std::uint64_t
derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based stream: the k-th draw is a pure function of (key, k), so
/// the values a node sees never depend on the order nodes are visited in.
class CounterStream
{
public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept
    : key_(key)
  {
  }

  //! Stream dedicated to node (generation, rank) of a tree seeded by `seed`.
  static constexpr CounterStream for_node(std::uint64_t seed, std::uint64_t generation,
                                          std::uint64_t rank) noexcept
  {
    return CounterStream(splitmix64(splitmix64(splitmix64(seed) ^ generation) ^ rank));
  }

  constexpr std::uint64_t next_u64() noexcept
  {
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  //! Uniform on the open interval (0, 1).
  constexpr double uniform() noexcept
  {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Uniform integer in [0, bound), bound > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept
  {
    // Lemire's multiply-shift with rejection.
    while (true) {
      const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (-bound) % bound)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

  //! Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() noexcept
  {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace bmc
