#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "spanrole/analysis.hpp"

using namespace spanrole;

TEST_CASE("cosine ranking of vectors at known angles") {
    // reference vectors at 10, 50 and 100 degrees; query at 0 degrees
    auto at = [](double degrees) {
        const double rad = degrees * std::numbers::pi / 180.0;
        return std::vector<double>{std::cos(rad), std::sin(rad)};
    };
    std::vector<double> data;
    for (double d : {100.0, 10.0, 50.0}) {
        const auto v = at(d);
        data.insert(data.end(), v.begin(), v.end());
    }
    const Tensor reference(3, 2, data);
    const auto query = at(0.0);
    const auto ranked = nearest_neighbors(query, reference, 3);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].first == 1);
    CHECK(ranked[1].first == 2);
    CHECK(ranked[2].first == 0);
    CHECK(ranked[0].second == doctest::Approx(std::cos(10.0 * std::numbers::pi / 180.0)).epsilon(1e-14));
    CHECK(ranked[2].second == doctest::Approx(std::cos(100.0 * std::numbers::pi / 180.0)).epsilon(1e-12));
    CHECK(nearest_neighbors(query, reference, 2).size() == 2);
    CHECK(cosine_similarity(std::vector<double>{0, 0}, query) == 0.0);
}

TEST_CASE("a query span that is also a reference span finds itself first") {
    const Corpus corpus = fixture::synthetic(1, 10);
    auto model = fixture::model(corpus, 1);
    // reference gold = the model's own predictions, so every query is present
    Corpus reference = corpus;
    for (auto& inst : reference) inst.gold = model->predict(inst, DecodeMode::Greedy);
    const auto report = analyze_neighbors(*model, corpus, reference, 10);
    REQUIRE_FALSE(report.queries.empty());
    for (const auto& q : report.queries) {
        REQUIRE_FALSE(q.neighbors.empty());
        CHECK(q.neighbors.front().similarity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(q.neighbors.size() <= 10);
    }
    CHECK_FALSE(report.truncated);
    const auto wide = analyze_neighbors(*model, corpus, reference, 100000);
    CHECK(wide.truncated);
    CHECK(to_json(report.queries.front()).at("neighbors").size() == report.queries.front().neighbors.size());
}

TEST_CASE("label embedding CSV has one row per label") {
    const Corpus corpus = fixture::synthetic(1, 5);
    auto model = fixture::model(corpus, 1);
    std::ostringstream out;
    write_label_embeddings(out, model->labels(), model->parameters().value(model->label_matrix().weights));
    std::istringstream lines(out.str());
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == static_cast<long>(model->rep_width()));
    }
    CHECK(rows == model->labels().size());
}
