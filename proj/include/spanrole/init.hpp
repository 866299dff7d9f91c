#pragma once

#include <cstddef>
#include <cstdint>

#include "spanrole/rng.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

// Random matrix with orthonormal rows or columns, whichever side is smaller.
Tensor orthonormal_init(std::size_t rows, std::size_t cols, std::uint64_t seed);
Tensor orthonormal_init(std::size_t rows, std::size_t cols, Rng& rng);

// Glorot/Xavier uniform: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

Tensor gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

}  // namespace spanrole

namespace spanrole {

// Inverted-dropout mask: entries are 0 with probability (1 - keep) and
// 1 / keep otherwise. keep == 1 yields all ones.
Tensor dropout_mask(std::size_t rows, std::size_t cols, double keep, Rng& rng);

}  // namespace spanrole
