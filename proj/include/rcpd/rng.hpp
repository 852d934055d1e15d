#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rcpd {

namespace detail {

// splitmix64 finalizer; good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based sub-seed derivation. Instances, cases and solver inits each
/// get an independent stream from (master, a, b, c) without shared state, so
/// batches can run in any order or in parallel and stay reproducible.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = detail::mix64(master);
    h = detail::mix64(h ^ detail::mix64(a + 0x51ed2701));
    h = detail::mix64(h ^ detail::mix64(b + 0x2545f491));
    h = detail::mix64(h ^ detail::mix64(c + 0x9e3779b9));
    return h;
}

/// Seeded generator with explicit samplers. The sampling formulas are pinned
/// here (instead of std::*_distribution) so that a seed fully determines the
/// stream regardless of standard library version.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        const double u1 = 1.0 - uniform01(); // in (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Cauchy with location 0: scale * tan(pi * (u - 1/2)).
    double cauchy(double scale) {
        return scale * std::tan(std::numbers::pi * (uniform01() - 0.5));
    }

private:
    std::mt19937_64 gen_;
};

} // namespace rcpd
