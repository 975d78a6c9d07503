// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_RNG_HPP
#define EPSNODE_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace epsnode {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child seed from a base seed and an ordered list of indices. The result depends
// only on the values, never on call order across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = mix64(base);
    for (auto p : parts)
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

} // namespace epsnode

#endif
