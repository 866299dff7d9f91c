#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spanrole/adam.hpp"
#include "spanrole/errors.hpp"
#include "spanrole/init.hpp"

using namespace spanrole;

namespace {

// Max deviation of the smaller-side Gram matrix from the identity.
double gram_error(const Tensor& q) {
    const bool columns = q.rows() >= q.cols();
    const Tensor gram = columns ? matmul_tn(q, q) : matmul_nt(q, q);
    double worst = 0.0;
    for (std::size_t r = 0; r < gram.rows(); ++r)
        for (std::size_t c = 0; c < gram.cols(); ++c)
            worst = std::max(worst, std::abs(gram(r, c) - (r == c ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

TEST_CASE("orthonormal 1x1 is plus or minus one") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Tensor q = orthonormal_init(1, 1, seed);
        CHECK(std::abs(std::abs(q.item()) - 1.0) < 1e-15);
    }
}

TEST_CASE("orthonormal square and rectangular Gram matrices") {
    CHECK(gram_error(orthonormal_init(4, 4, 7)) < 1e-8);
    CHECK(gram_error(orthonormal_init(6, 3, 2)) < 1e-8);
    CHECK(gram_error(orthonormal_init(3, 6, 2)) < 1e-8);
    CHECK(gram_error(orthonormal_init(300, 600, 1)) < 1e-8);
    CHECK(gram_error(orthonormal_init(600, 300, 1)) < 1e-8);
}

TEST_CASE("orthonormal init is seeded") {
    CHECK(orthonormal_init(5, 4, 3) == orthonormal_init(5, 4, 3));
    CHECK_FALSE(orthonormal_init(5, 4, 3) == orthonormal_init(5, 4, 4));
}

TEST_CASE("glorot uniform stays in its bound") {
    Rng rng(1);
    const Tensor w = glorot_uniform(10, 20, rng);
    const double bound = std::sqrt(6.0 / 30.0);
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(w[k]) <= bound);
}

TEST_CASE("dropout mask entries are zero or the inverse keep ratio") {
    Rng rng(2);
    const Tensor mask = dropout_mask(50, 50, 0.8, rng);
    std::size_t zeros = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
        CHECK((mask[k] == 0.0 || mask[k] == 1.0 / 0.8));
        zeros += mask[k] == 0.0;
    }
    CHECK(zeros > 400);
    CHECK(zeros < 600);
}

TEST_CASE("single Adam step with unit gradient") {
    Tensor param = Tensor::scalar(0.0);
    AdamState state = AdamState::fresh(param);
    adam_step(param, Tensor::scalar(1.0), state, 0.001);
    // m_hat = v_hat = 1, so the step is lr / (1 + eps).
    CHECK(param.item() == doctest::Approx(-0.000999999990).epsilon(1e-12));
    CHECK(std::abs(param.item() - (-0.001 / (1.0 + 1e-8))) < 1e-18);
    CHECK(state.t == 1);
}

TEST_CASE("Adam with zero gradient leaves the parameter unchanged") {
    Rng rng(3);
    Tensor param = oracle::random_tensor(2, 3, rng);
    const Tensor before = param;
    AdamState state = AdamState::fresh(param);
    adam_step(param, Tensor(2, 3, 0.0), state, 0.001);
    CHECK(param == before);
}

TEST_CASE("two constant-gradient Adam steps move by the same amount") {
    Tensor param = Tensor::scalar(1.0);
    AdamState state = AdamState::fresh(param);
    adam_step(param, Tensor::scalar(1.0), state, 0.001);
    const double first = param.item() - 1.0;
    const double mid = param.item();
    adam_step(param, Tensor::scalar(1.0), state, 0.001);
    const double second = param.item() - mid;
    CHECK(std::abs(first - second) < 1e-9);
    CHECK(state.t == 2);
}

TEST_CASE("Adam rejects shape mismatches") {
    Tensor param(2, 2, 0.0);
    AdamState state = AdamState::fresh(param);
    CHECK_THROWS_AS(adam_step(param, Tensor(1, 2, 0.0), state, 0.001), ContractViolation);
}

TEST_CASE("Adam over a store skips parameters without gradients") {
    ParameterStore store;
    const ParamId a = store.add("a", Tensor::scalar(1.0));
    const ParamId b = store.add("b", Tensor::scalar(1.0));
    Adam adam;
    GradientMap grads;
    grads.emplace(a, Tensor::scalar(1.0));
    adam.step(store, grads, 0.01);
    CHECK(store.value(a).item() < 1.0);
    CHECK(store.value(b).item() == 1.0);
    CHECK(adam.state(a) != nullptr);
    CHECK(adam.state(b) == nullptr);
}

TEST_CASE("l2 penalty value and gradient") {
    ParameterStore store;
    const ParamId a = store.add("a", Tensor(1, 2, std::vector<double>{1.0, 1.0}));
    const ParamId b = store.add("b", Tensor(1, 2, std::vector<double>{1.0, -1.0}));
    CHECK(l2_penalty_value(store, 0.0001) == doctest::Approx(0.0002).epsilon(1e-14));
    CHECK(l2_penalty_value(store, 0.0) == 0.0);

    Graph g;
    const std::vector<NodeId> params{g.parameter(store, a), g.parameter(store, b)};
    const NodeId penalty = l2_penalty(g, params, 0.0001);
    CHECK(g.value(penalty).item() == doctest::Approx(0.0002).epsilon(1e-14));
    const auto grads = g.backward(penalty);
    CHECK(grads.at(b)(0, 1) == doctest::Approx(-0.0001).epsilon(1e-14));

    const double err = oracle::gradcheck_parameters(store, [&](Graph& graph) {
        const std::vector<NodeId> nodes{graph.parameter(store, a), graph.parameter(store, b)};
        return l2_penalty(graph, nodes, 0.3);
    });
    CHECK(err < 1e-4);
}
