#pragma once

#include <cstdint>
#include <random>

// Counter-based stream splitting. Every independent draw site (a scan point,
// a dark run, a blocked-path run, a block of HBT triggers) gets its own
// engine seeded from (base seed, stream id, counter) through a SplitMix64
// finaliser, so results never depend on execution order.
namespace afshar::rng {

enum class Stream : std::uint64_t {
  scan_point = 1,
  dark_run = 2,
  blocked_path1 = 3,
  blocked_path2 = 4,
  hbt_block = 5,
  campaign_width = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t counter);

using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t counter);

}  // namespace afshar::rng
