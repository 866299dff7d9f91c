#include "spanrole/init.hpp"

#include <cmath>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

// Orthonormalizes the columns of a tall (rows >= cols) matrix in place with
// modified Gram-Schmidt. Two passes bring the Gram matrix to working precision.
void orthonormalize_columns(Tensor& m, Rng& rng) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    for (std::size_t c = 0; c < cols; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                double proj = 0.0;
                for (std::size_t r = 0; r < rows; ++r) proj += m(r, prev) * m(r, c);
                for (std::size_t r = 0; r < rows; ++r) m(r, c) -= proj * m(r, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) norm += m(r, c) * m(r, c);
        norm = std::sqrt(norm);
        if (norm < 1e-10) {
            // Degenerate draw; resample this column and retry.
            for (std::size_t r = 0; r < rows; ++r) m(r, c) = rng.normal();
            --c;
            continue;
        }
        for (std::size_t r = 0; r < rows; ++r) m(r, c) /= norm;
    }
}

}  // namespace

Tensor orthonormal_init(std::size_t rows, std::size_t cols, Rng& rng) {
    require(rows >= 1 && cols >= 1, "orthonormal_init: dimensions must be positive");
    const bool tall = rows >= cols;
    Tensor m = gaussian(tall ? rows : cols, tall ? cols : rows, 1.0, rng);
    orthonormalize_columns(m, rng);
    return tall ? m : transpose(m);
}

Tensor orthonormal_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    return orthonormal_init(rows, cols, rng);
}

Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Tensor out(rows, cols);
    for (double& v : out.values()) {
        v = rng.uniform(-limit, limit);
    }
    return out;
}

Tensor gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    Tensor out(rows, cols);
    for (double& v : out.values()) {
        v = stddev * rng.normal();
    }
    return out;
}

}  // namespace spanrole

namespace spanrole {

Tensor dropout_mask(std::size_t rows, std::size_t cols, double keep, Rng& rng) {
    require(keep > 0.0 && keep <= 1.0, "dropout_mask: keep ratio must be in (0, 1]");
    Tensor mask(rows, cols, 1.0);
    if (keep == 1.0) {
        return mask;
    }
    const double scale = 1.0 / keep;
    for (double& v : mask.values()) {
        v = rng.uniform() < keep ? scale : 0.0;
    }
    return mask;
}

}  // namespace spanrole
