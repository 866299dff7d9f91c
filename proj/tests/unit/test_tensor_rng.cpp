#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "spanrole/errors.hpp"
#include "spanrole/rng.hpp"
#include "spanrole/tensor.hpp"

using namespace spanrole;

TEST_CASE("tensor construction and shape checks") {
    Tensor t(2, 3, 1.5);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.size() == 6);
    CHECK(t(1, 2) == 1.5);
    CHECK_THROWS_AS(Tensor(0, 3), ContractViolation);
    CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1.0, 2.0}), ContractViolation);
    CHECK(Tensor().empty());
    CHECK(Tensor::scalar(4.0).item() == 4.0);
}

TEST_CASE("matmul variants agree with explicit transposes") {
    Rng rng(3);
    Tensor a(3, 4);
    Tensor b(4, 2);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = rng.uniform(-1, 1);
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = rng.uniform(-1, 1);
    const Tensor ab = matmul(a, b);
    CHECK(max_abs_difference(ab, matmul_nt(a, transpose(b))) < 1e-15);
    CHECK(max_abs_difference(ab, matmul_tn(transpose(a), b)) < 1e-15);
    double expected = 0.0;
    for (std::size_t k = 0; k < 4; ++k) expected += a(2, k) * b(k, 1);
    CHECK(ab(2, 1) == doctest::Approx(expected).epsilon(1e-15));
    CHECK_THROWS_AS(matmul(a, a), ContractViolation);
}

TEST_CASE("identity and elementwise arithmetic") {
    const Tensor i = Tensor::identity(3);
    CHECK(i(0, 0) == 1.0);
    CHECK(i(0, 1) == 0.0);
    Tensor x(1, 3, std::vector<double>{1, 2, 3});
    CHECK(hadamard(x, x) == Tensor(1, 3, std::vector<double>{1, 4, 9}));
    CHECK((x + x) == x * 2.0);
    CHECK((x - x).squared_norm() == 0.0);
    CHECK(x.squared_norm() == 14.0);
}

TEST_CASE("rng is a pure function of seed and counter") {
    Rng a(42);
    Rng b(42);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
    Rng c(43);
    CHECK(Rng(42).next_u64() != c.next_u64());
    CHECK(Rng(42).fork(1).next_u64() != Rng(42).fork(2).next_u64());
}

TEST_CASE("rng ranges") {
    Rng rng(9);
    std::set<int> seen;
    for (int k = 0; k < 2000; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int v = rng.between(-2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
        seen.insert(v);
        CHECK(rng.below(7) < 7);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("normal draws have roughly unit variance") {
    Rng rng(5);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("shuffle permutes deterministically") {
    std::vector<int> a(20);
    std::iota(a.begin(), a.end(), 0);
    auto b = a;
    Rng r1(1);
    Rng r2(1);
    r1.shuffle(std::span<int>(a));
    r2.shuffle(std::span<int>(b));
    CHECK(a == b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expected(20);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);
}
