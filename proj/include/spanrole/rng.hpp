#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace spanrole {

// Counter-based generator: the k-th draw is a pure function of (seed, k),
// so a stream can be reproduced or forked without hidden state.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    // Uniform in [0, 1).
    double uniform() noexcept;
    double uniform(double low, double high) noexcept { return low + (high - low) * uniform(); }
    // Uniform integer in [0, n). n must be positive.
    std::size_t below(std::size_t n) noexcept;
    // Uniform integer in [low, high].
    int between(int low, int high) noexcept;
    double normal() noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }

    // Independent stream derived from this generator's seed and a tag.
    Rng fork(std::uint64_t tag) const noexcept;

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t k = items.size(); k > 1; --k) {
            std::swap(items[k - 1], items[below(k)]);
        }
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace spanrole
