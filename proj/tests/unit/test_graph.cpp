#include <doctest.h>

#include <cmath>

#include "op_cases.hpp"
#include "oracles.hpp"
#include "spanrole/errors.hpp"
#include "spanrole/graph.hpp"
#include "spanrole/init.hpp"

using namespace spanrole;

TEST_CASE("x*x at 3 has gradient 6") {
    ParameterStore store;
    const ParamId x = store.add("x", Tensor::scalar(3.0));
    Graph g;
    const NodeId node = g.parameter(store, x);
    const auto grads = g.backward(g.mul(node, node));
    CHECK(grads.at(x).item() == 6.0);
}

TEST_CASE("log-sum-exp gradient is the softmax") {
    Graph g;
    const NodeId v = g.variable(Tensor(1, 2, 0.0));
    g.backward(g.log_sum_exp(v));
    const Tensor grad = g.gradient(v);
    CHECK(grad(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(grad(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("log-sum-exp stays finite for large inputs") {
    Graph g;
    const NodeId v = g.constant(Tensor(1, 3, std::vector<double>{1000.0, 1000.0, -1000.0}));
    const double out = g.value(g.log_sum_exp(v)).item();
    CHECK(out == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("every op passes finite differences on random instances") {
    for (const auto& c : oracle::op_cases()) {
        CAPTURE(c.name);
        Rng rng(mix64(c.name.size() * 131 + 7));
        for (int trial = 0; trial < 20; ++trial) {
            CHECK(c.run(rng) < 1e-4);
        }
    }
}

TEST_CASE("3x4 matmul chain against finite differences") {
    Rng rng(11);
    const double err = oracle::gradcheck(
        {oracle::random_tensor(3, 4, rng), oracle::random_tensor(4, 4, rng), oracle::random_tensor(4, 2, rng)},
        [](Graph& g, const std::vector<NodeId>& x) { return g.tanh(g.matmul(g.matmul(x[0], x[1]), x[2])); });
    CHECK(err < 1e-4);
}

TEST_CASE("non-scalar loss is rejected") {
    Graph g;
    const NodeId v = g.variable(Tensor(2, 2, 1.0));
    CHECK_THROWS_AS(g.backward(v), ContractViolation);
}

TEST_CASE("generic builder rejects leaves and attribute ops") {
    Graph g;
    const NodeId a = g.variable(Tensor(2, 2, 1.0));
    const NodeId b = g.variable(Tensor(2, 2, 2.0));
    const std::vector<NodeId> two{a, b};
    CHECK(g.value(g.apply(Op::Add, two))(0, 0) == 3.0);
    CHECK_THROWS_AS(g.apply(Op::Constant, two), ContractViolation);
    CHECK_THROWS_AS(g.apply(Op::Scale, two), ContractViolation);
    CHECK_THROWS_AS(g.apply(static_cast<Op>(200), two), ContractViolation);
}

TEST_CASE("constants and variables stay out of the gradient map") {
    ParameterStore store;
    const ParamId w = store.add("w", Tensor(1, 2, 1.0));
    Graph g;
    const NodeId c = g.constant(Tensor(1, 2, 3.0));
    const NodeId v = g.variable(Tensor(1, 2, 2.0));
    const NodeId loss = g.sum(g.mul(g.mul(g.parameter(store, w), c), v));
    const auto grads = g.backward(loss);
    CHECK(grads.size() == 1);
    CHECK(grads.at(w)(0, 1) == 6.0);
    CHECK(g.gradient(c).squared_norm() == 0.0);
    CHECK(g.gradient(v)(0, 0) == 3.0);
}

TEST_CASE("parameters unrelated to the loss get no gradient") {
    ParameterStore store;
    const ParamId a = store.add("a", Tensor(1, 1, 1.0));
    const ParamId b = store.add("b", Tensor(1, 1, 1.0));
    Graph g;
    const NodeId na = g.parameter(store, a);
    g.parameter(store, b);
    const auto grads = g.backward(g.sum(na));
    CHECK(grads.contains(a));
    CHECK_FALSE(grads.contains(b));
}

TEST_CASE("parameter nodes are shared per id") {
    ParameterStore store;
    const ParamId a = store.add("a", Tensor(1, 1, 2.0));
    Graph g;
    CHECK(g.parameter(store, a) == g.parameter(store, a));
}

TEST_CASE("dropout with keep 1 is the identity and a fixed mask routes gradients") {
    Rng rng(1);
    const Tensor ones = dropout_mask(3, 3, 1.0, rng);
    for (std::size_t k = 0; k < ones.size(); ++k) CHECK(ones[k] == 1.0);

    Graph g;
    const Tensor x = oracle::random_tensor(1, 4, rng);
    const NodeId v = g.variable(x);
    const Tensor mask(1, 4, std::vector<double>{2.0, 0.0, 2.0, 0.0});
    g.backward(g.sum(g.dropout(v, mask)));
    const Tensor grad = g.gradient(v);
    CHECK(grad(0, 0) == 2.0);
    CHECK(grad(0, 1) == 0.0);
    CHECK(grad(0, 3) == 0.0);
}

TEST_CASE("backward is deterministic") {
    Rng rng(4);
    const Tensor x = oracle::random_tensor(3, 3, rng);
    auto run = [&] {
        Graph g;
        const NodeId v = g.variable(x);
        g.backward(g.log_sum_exp(g.matmul(g.tanh(v), v)));
        return g.gradient(v);
    };
    CHECK(run() == run());
}
