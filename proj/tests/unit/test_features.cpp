#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "spanrole/errors.hpp"
#include "spanrole/features.hpp"

using namespace spanrole;

TEST_CASE("load a two-word embedding file") {
    std::istringstream in("cat 0.1 0.2\ndog 0.3 0.4\n");
    const EmbeddingTable table = EmbeddingTable::load(in);
    CHECK(table.vocab_size() == 2);
    CHECK(table.dim() == 2);
    CHECK(table.matrix().rows() == 3);
    const std::vector<std::string> tokens{"dog", "cat", "bird"};
    const Tensor x = table.lookup(tokens);
    CHECK(x(0, 0) == 0.3);
    CHECK(x(1, 1) == 0.2);
    CHECK(x(2, 0) == 0.0);
    CHECK(x(2, 1) == 0.0);
}

TEST_CASE("lowercase fallback before UNK") {
    std::istringstream in("cat 1 2\n");
    const EmbeddingTable table = EmbeddingTable::load(in);
    CHECK(table.row_of("Cat") == 0);
    CHECK(table.row_of("CAT") == 0);
    CHECK(table.row_of("kat") == table.unk_row());
}

TEST_CASE("fifty-dimensional table") {
    std::ostringstream text;
    for (int w = 0; w < 3; ++w) {
        text << "w" << w;
        for (int k = 0; k < 50; ++k) text << ' ' << 0.01 * k;
        text << '\n';
    }
    std::istringstream in(text.str());
    CHECK(EmbeddingTable::load(in).dim() == 50);
}

TEST_CASE("embedding file errors") {
    std::istringstream ragged("a 1 2\nb 1 2 3\n");
    try {
        EmbeddingTable::load(ragged);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(EmbeddingTable::load(empty), DataError);
}

TEST_CASE("contextual vectors") {
    std::istringstream in(R"({"id":"s1","vectors":[[1,2],[3,4],[5,6],[7,8]]})"
                          "\n");
    const ContextualVectors vectors = ContextualVectors::load(in);
    CHECK(vectors.dim() == 2);
    CHECK(vectors.get("s1", 4)(3, 1) == 8.0);
    CHECK_THROWS_AS(vectors.get("s2"), DataError);
    CHECK_THROWS_AS(vectors.get("s1", 3), DataError);

    const WordInputs inputs{ContextualVectors(vectors)};
    PredicateInstance inst{"s1", {"a", "b", "c", "d"}, 2, std::nullopt};
    CHECK(inputs.vectors(inst) == vectors.get("s1"));
}

TEST_CASE("predicate marks and input assembly") {
    CHECK(predicate_marks(4, 2) == std::vector<std::size_t>{0, 1, 0, 0});
    ParameterStore store;
    Rng rng(1);
    const MarkEmbedding marks = MarkEmbedding::create(store, 50, rng);
    const Tensor words(4, 50, 0.25);
    Graph g;
    const NodeId x = assemble_inputs(g, words, 2, g.parameter(store, marks.table));
    const Tensor& v = g.value(x);
    CHECK(v.rows() == 4);
    CHECK(v.cols() == 100);
    const Tensor& table = store.value(marks.table);
    for (std::size_t k = 0; k < 50; ++k) {
        // same word everywhere: only the mark half differs
        CHECK(v(0, k) == v(1, k));
        CHECK(v(1, 50 + k) == table(1, k));
        CHECK(v(0, 50 + k) == table(0, k));
        CHECK(v(3, 50 + k) == table(0, k));
    }
    CHECK_THROWS_AS(assemble_inputs(g, words, 5, g.parameter(store, marks.table)), ContractViolation);
}

TEST_CASE("mark embedding receives gradient") {
    ParameterStore store;
    Rng rng(2);
    const MarkEmbedding marks = MarkEmbedding::create(store, 3, rng);
    Graph g;
    const NodeId x = assemble_inputs(g, oracle::random_tensor(3, 2, rng), 1, g.parameter(store, marks.table));
    const auto grads = g.backward(g.squared_norm(x));
    CHECK(grads.at(marks.table).squared_norm() > 0.0);
}
