#include "spanrole/rng.hpp"

#include <cmath>
#include <numbers>

namespace spanrole {

std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t key = mix64(seed_);
    return mix64(key ^ mix64(counter_++ + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) noexcept {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = next_u64();
        const unsigned __int128 product = static_cast<unsigned __int128>(x) * bound;
        if (static_cast<std::uint64_t>(product) >= threshold) {
            return static_cast<std::size_t>(product >> 64);
        }
    }
}

int Rng::between(int low, int high) noexcept {
    return low + static_cast<int>(below(static_cast<std::size_t>(high - low + 1)));
}

double Rng::normal() noexcept {
    // Box-Muller; one of the pair is discarded so each draw costs two counters.
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::fork(std::uint64_t tag) const noexcept {
    return Rng(mix64(seed_ ^ mix64(tag + 0x2545f4914f6cdd1dULL)));
}

}  // namespace spanrole
