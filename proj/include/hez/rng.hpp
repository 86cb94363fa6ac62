#pragma once

#include <array>
#include <cstdint>

namespace hez {

// Philox4x32-10 counter-based generator. A draw is addressed by
// (seed, path, step, slot), so streams are reproducible under any thread
// schedule and never overlap across paths.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path,
                                              std::uint32_t step, std::uint32_t slot);
};

// Uniform in (0, 1] from two 32-bit words.
double uniform_from(std::uint32_t hi, std::uint32_t lo);

// Two standard normals per (seed, path, step, slot) block via Box-Muller.
struct NormalPair {
    double first;
    double second;
};
NormalPair normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                       std::uint32_t slot);

// Two uniforms in (0, 1] from one block.
struct UniformPair {
    double first;
    double second;
};
UniformPair uniform_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                         std::uint32_t slot);

// Thread budget: HORIZON_EZ_THREADS when set (at least 1), otherwise the
// hardware concurrency.
unsigned thread_budget();

}  // namespace hez
