#pragma once

// Counter-based random streams: the normal variate for a given
// (master seed, trajectory, step, mode, draw) tuple is a pure function of
// those coordinates, so ensembles reproduce bit-for-bit regardless of
// evaluation order or parallelism degree. The block cipher is Philox4x32-10.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sks {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t m0 = 0xD2511F53ull;
    constexpr std::uint64_t m1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = m0 * ctr[0];
    const std::uint64_t p1 = m1 * ctr[2];
    const std::array<std::uint32_t, 4> next = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0),
    };
    ctr = next;
    key[0] += 0x9E3779B9u;  // golden ratio
    key[1] += 0xBB67AE85u;  // sqrt(3) - 1
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}

// Uniform in (0, 1]: 53 random bits, never exactly zero.
inline double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

}  // namespace detail

struct StreamCoords {
    std::uint64_t trajectory = 0;
    std::uint64_t step = 0;
    std::uint32_t mode = 0;   // flat basis index (or any per-step lane)
    std::uint32_t draw = 0;   // extra counter when one lane needs several variates
};

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Two iid standard normals for one coordinate tuple (Box-Muller).
    std::array<double, 2> normal_pair(const StreamCoords& c) const {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(c.step),
            static_cast<std::uint32_t>(c.step >> 32),
            c.mode,
            c.draw,
        };
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_ ^ c.trajectory),
            static_cast<std::uint32_t>((seed_ >> 32) ^ (c.trajectory >> 32) ^ 0x5851F42Du),
        };
        const auto out = detail::philox4x32(ctr, key);
        const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        const double u1 = detail::to_unit(a);
        const double u2 = detail::to_unit(b);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    double normal(const StreamCoords& c) const { return normal_pair(c)[0]; }

  private:
    std::uint64_t seed_;
};

// One trajectory's view of the generator: fixes the trajectory coordinate.
class RngStream {
  public:
    RngStream(const CounterRng& rng, std::uint64_t trajectory) : rng_(&rng), trajectory_(trajectory) {}

    double normal(std::uint64_t step, std::uint32_t mode, std::uint32_t draw = 0) const {
        return rng_->normal({trajectory_, step, mode, draw});
    }

    std::uint64_t trajectory() const { return trajectory_; }

  private:
    const CounterRng* rng_;
    std::uint64_t trajectory_;
};

}  // namespace sks
