#include "hez/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace hez {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t seed, std::uint64_t path,
                                               std::uint32_t step, std::uint32_t slot) {
    std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(path),
                                        static_cast<std::uint32_t>(path >> 32), step, slot};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        round_once(ctr, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

double uniform_from(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(x) + 1.0) * 0x1.0p-64;  // in (0, 1]
}

NormalPair normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                       std::uint32_t slot) {
    const auto b = Philox4x32::block(seed, path, step, slot);
    const double u1 = uniform_from(b[0], b[1]);
    const double u2 = uniform_from(b[2], b[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return NormalPair{rad * std::cos(ang), rad * std::sin(ang)};
}

UniformPair uniform_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                         std::uint32_t slot) {
    const auto b = Philox4x32::block(seed, path, step, slot);
    return UniformPair{uniform_from(b[0], b[1]), uniform_from(b[2], b[3])};
}

unsigned thread_budget() {
    if (const char* env = std::getenv("HORIZON_EZ_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
        return 1;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

}  // namespace hez
