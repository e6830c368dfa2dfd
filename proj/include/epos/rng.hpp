#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace epos {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t tag_hash(std::string_view tag)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Independent stream seed for (run seed, purpose, index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0)
{
    return mix64(mix64(seed ^ tag_hash(stream)) + mix64(index));
}

inline Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0)
{
    return Rng{derive_seed(seed, stream, index)};
}

} // namespace epos
