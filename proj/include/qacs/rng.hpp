#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qacs {

using random_stream = std::mt19937_64;

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Reserved frame index for the stream that places users of a drop.
inline constexpr std::uint64_t drop_layout_index = std::numeric_limits<std::uint64_t>::max();

/// Independent stream keyed by (seed, drop, frame). The key, not the order in which
/// frames are visited, determines the draws, so any worker schedule reproduces a run.
inline random_stream substream(std::uint64_t seed, std::uint64_t drop, std::uint64_t frame)
{
    std::uint64_t key = detail::splitmix64(seed);
    key = detail::splitmix64(key ^ drop);
    key = detail::splitmix64(key ^ frame);
    return random_stream(key);
}

} // namespace qacs
