#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spanrole/encoder.hpp"
#include "spanrole/errors.hpp"

using namespace spanrole;

namespace {

Tensor run_layer(const EncoderStack& stack, const ParameterStore& store, std::size_t layer, const Tensor& x) {
    Graph g;
    return g.value(stack.run_layer(g, store, layer, g.constant(x)));
}

Tensor encode(const EncoderStack& stack, const ParameterStore& store, const Tensor& x) {
    Graph g;
    return g.value(stack.encode(g, store, g.constant(x), {}));
}

}  // namespace

TEST_CASE("zero weights and inputs give a zero state") {
    ParameterStore store;
    Rng rng(1);
    const LstmLayer layer = LstmLayer::create(store, "l", 3, 2, Direction::LeftToRight, rng);
    for (auto id : store.ids()) store.value(id) = Tensor(store.value(id).rows(), store.value(id).cols(), 0.0);
    Graph g;
    const auto state = lstm_cell(g, store, layer, g.constant(Tensor(1, 3, 0.0)), std::nullopt);
    CHECK(g.value(state.h).squared_norm() == 0.0);
    CHECK(g.value(state.c).squared_norm() == 0.0);
}

TEST_CASE("saturated forget gate keeps the cell") {
    ParameterStore store;
    Rng rng(1);
    const std::size_t d = 2;
    const LstmLayer layer = LstmLayer::create(store, "l", 2, d, Direction::LeftToRight, rng);
    store.value(layer.input_weights) = Tensor(4 * d, 2, 0.0);
    store.value(layer.recurrent_weights) = Tensor(4 * d, d, 0.0);
    Tensor bias(1, 4 * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        bias(0, k) = -60.0;     // input gate -> 0
        bias(0, d + k) = 60.0;  // forget gate -> 1
    }
    store.value(layer.bias) = bias;
    Graph g;
    const NodeId h0 = g.constant(Tensor(1, d, 0.3));
    const NodeId c0 = g.constant(Tensor(1, d, std::vector<double>{0.7, -0.4}));
    const auto state = lstm_cell(g, store, layer, g.constant(Tensor(1, 2, 1.0)), LstmState{h0, c0});
    CHECK(g.value(state.c)(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(g.value(state.c)(0, 1) == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("LSTM cell gradients pass finite differences") {
    ParameterStore store;
    Rng rng(5);
    const LstmLayer layer = LstmLayer::create(store, "l", 3, 2, Direction::LeftToRight, rng);
    store.value(layer.bias) = oracle::random_tensor(1, 8, rng);
    const Tensor x = oracle::random_tensor(1, 3, rng);
    const Tensor h = oracle::random_tensor(1, 2, rng);
    const Tensor c = oracle::random_tensor(1, 2, rng);
    const double err = oracle::gradcheck_parameters(store, [&](Graph& g) {
        const auto s = lstm_cell(g, store, layer, g.constant(x), LstmState{g.constant(h), g.constant(c)});
        return oracle::random_projection(g, g.concat_cols(s.h, s.c), 3);
    });
    CHECK(err < 1e-4);
}

TEST_CASE("encoder shapes") {
    ParameterStore store;
    Rng rng(2);
    const auto stack = EncoderStack::create(store, 6, 4, 4, rng);
    CHECK(stack.layer_count() == 4);
    CHECK(stack.layer(0).direction == Direction::LeftToRight);
    CHECK(stack.layer(1).direction == Direction::RightToLeft);
    CHECK(store.value(stack.projection(0)).cols() == 6 + 4);
    CHECK(store.value(stack.projection(1)).cols() == 8);
    const Tensor h = encode(stack, store, oracle::random_tensor(1, 6, rng));
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 4);
    CHECK(encode(stack, store, oracle::random_tensor(5, 6, rng)).rows() == 5);
}

TEST_CASE("odd layers only look left and even layers only look right") {
    ParameterStore store;
    Rng rng(3);
    const auto stack = EncoderStack::create(store, 3, 4, 2, rng);
    const std::size_t T = 6;
    const Tensor x = oracle::random_tensor(T, 3, rng);
    const Tensor base_forward = run_layer(stack, store, 0, x);
    for (std::size_t t_prime = 0; t_prime < T; ++t_prime) {
        Tensor perturbed = x;
        perturbed(t_prime, 0) += 0.5;
        const Tensor fwd = run_layer(stack, store, 0, perturbed);
        for (std::size_t t = 0; t < T; ++t) {
            const bool changed = !std::equal(fwd.row(t).begin(), fwd.row(t).end(), base_forward.row(t).begin());
            CHECK(changed == (t >= t_prime));
        }
    }
    const Tensor x2 = oracle::random_tensor(T, 4, rng);
    const Tensor base_backward = run_layer(stack, store, 1, x2);
    for (std::size_t t_prime = 0; t_prime < T; ++t_prime) {
        Tensor perturbed = x2;
        perturbed(t_prime, 1) += 0.5;
        const Tensor bwd = run_layer(stack, store, 1, perturbed);
        for (std::size_t t = 0; t < T; ++t) {
            const bool changed = !std::equal(bwd.row(t).begin(), bwd.row(t).end(), base_backward.row(t).begin());
            CHECK(changed == (t <= t_prime));
        }
    }
}

TEST_CASE("two layers reach every position") {
    ParameterStore store;
    Rng rng(4);
    const auto stack = EncoderStack::create(store, 3, 5, 2, rng);
    const std::size_t T = 5;
    const Tensor x = oracle::random_tensor(T, 3, rng);
    const Tensor base = encode(stack, store, x);
    for (std::size_t t_prime = 0; t_prime < T; ++t_prime) {
        Tensor perturbed = x;
        perturbed(t_prime, 2) += 0.5;
        const Tensor out = encode(stack, store, perturbed);
        for (std::size_t t = 0; t < T; ++t) {
            CHECK_FALSE(std::equal(out.row(t).begin(), out.row(t).end(), base.row(t).begin()));
        }
    }
}

TEST_CASE("encoder gradients and no dead parameters") {
    ParameterStore store;
    Rng rng(6);
    const auto stack = EncoderStack::create(store, 3, 3, 2, rng);
    for (std::size_t k = 0; k < stack.layer_count(); ++k) {
        store.value(stack.layer(k).bias) = oracle::random_tensor(1, 12, rng, -0.5, 0.5);
    }
    const Tensor x = oracle::random_tensor(4, 3, rng);
    auto build = [&](Graph& g) {
        return oracle::random_projection(g, stack.encode(g, store, g.constant(x), {}), 8);
    };
    Graph g;
    const auto grads = g.backward(build(g));
    for (auto id : store.ids()) {
        CAPTURE(store.name(id));
        REQUIRE(grads.contains(id));
        CHECK(grads.at(id).squared_norm() > 0.0);
    }
    CHECK(oracle::gradcheck_parameters(store, build) < 1e-4);
}

TEST_CASE("training-mode dropout is seeded and inference is pure") {
    ParameterStore store;
    Rng rng(7);
    const auto stack = EncoderStack::create(store, 3, 3, 2, rng);
    const Tensor x = oracle::random_tensor(4, 3, rng);
    CHECK(encode(stack, store, x) == encode(stack, store, x));
    auto train = [&](std::uint64_t seed) {
        Rng r(seed);
        Graph g;
        return g.value(stack.encode(g, store, g.constant(x), {true, 0.5, &r}));
    };
    CHECK(train(1) == train(1));
    CHECK_FALSE(train(1) == encode(stack, store, x));
}

TEST_CASE("binding rejects mismatched shapes") {
    ParameterStore store;
    Rng rng(8);
    EncoderStack::create(store, 3, 4, 2, rng);
    CHECK_NOTHROW(EncoderStack::bind(store, 3, 4, 2));
    CHECK_THROWS(EncoderStack::bind(store, 3, 5, 2));
    CHECK_THROWS(EncoderStack::bind(store, 3, 4, 3));
}
