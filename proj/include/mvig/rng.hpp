#pragma once

#include <cstdint>
#include <random>

namespace mvig {

/// All stochastic behavior in the library routes through these helpers so
/// results are reproducible bit-for-bit across platforms. std::mt19937_64
/// has a fully specified output sequence; the mappings below avoid the
/// implementation-defined std::uniform_* distributions.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Requires n > 0. Rejection-free modulo is
/// acceptable here: n is always tiny relative to 2^64 so bias is far below
/// any observable effect, and determinism is what matters.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

/// Uniform double in [lo, hi).
inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Derive a child seed from a parent seed and a stream index. Used to give
/// each episode an independent generator while keeping the whole experiment
/// a pure function of the top-level seed. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mvig
