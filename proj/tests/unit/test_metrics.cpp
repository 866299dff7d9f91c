#include <doctest.h>

#include <sstream>

#include "spanrole/errors.hpp"
#include "spanrole/metrics.hpp"

using namespace spanrole;

namespace {

// Hand oracle corpus: one instance with an A1/A2 label swap, one empty.
SpanAnnotations gold_two() {
    return {{"s1#2", {{1, 1, "A0"}, {3, 4, "A1"}}}, {"s2#1", {}}};
}
SpanAnnotations pred_two() {
    return {{"s1#2", {{1, 1, "A0"}, {3, 4, "A2"}}}, {"s2#1", {}}};
}

}  // namespace

TEST_CASE("perfect predictions") {
    const auto gold = gold_two();
    const auto r = labeled_prf(gold, gold);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
    CHECK(label_accuracy(gold, gold) == 1.0);
}

TEST_CASE("hand-built corpus") {
    const auto labeled = labeled_prf(pred_two(), gold_two());
    CHECK(labeled.matched == 1);
    CHECK(labeled.predicted == 2);
    CHECK(labeled.gold == 2);
    CHECK(labeled.precision == 0.5);
    CHECK(labeled.recall == 0.5);
    CHECK(labeled.f1 == 0.5);
    CHECK(boundary_prf(pred_two(), gold_two()).f1 == 1.0);
    CHECK(label_accuracy(pred_two(), gold_two()) == 0.5);
    const auto cm = confusion_matrix(pred_two(), gold_two());
    CHECK(cm.count("A1", "A2") == 1);
    CHECK(cm.count("A0", "A0") == 1);
    CHECK(cm.total() == 2);
    CHECK(cm.diagonal() == 1);
}

TEST_CASE("degenerate conventions") {
    const SpanAnnotations gold{{"a", {{1, 1, "A0"}}}};
    const SpanAnnotations empty{{"a", {}}};
    const auto r = labeled_prf(empty, gold);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
    CHECK_FALSE(label_accuracy(empty, gold).has_value());
}

TEST_CASE("boundary matching is exact and one-to-one") {
    const SpanAnnotations gold{{"a", {{2, 3, "A0"}}}};
    const SpanAnnotations shifted{{"a", {{2, 4, "A0"}}}};
    CHECK(boundary_prf(shifted, gold).matched == 0);
    const SpanAnnotations dup{{"a", {{2, 3, "A0"}, {2, 3, "A1"}}}};
    const auto r = boundary_prf(dup, gold);
    CHECK(r.matched == 1);
    CHECK(r.predicted == 2);
    // the exact label pairs first
    CHECK(label_accuracy(dup, gold) == 1.0);
}

TEST_CASE("swap pair fills both off-diagonal cells") {
    const SpanAnnotations gold{{"a", {{1, 1, "A0"}, {3, 3, "A1"}}}};
    const SpanAnnotations pred{{"a", {{1, 1, "A1"}, {3, 3, "A0"}}}};
    const auto cm = confusion_matrix(pred, gold);
    CHECK(cm.count("A0", "A1") == 1);
    CHECK(cm.count("A1", "A0") == 1);
    CHECK(cm.diagonal() == 0);
    for (const auto& row : cm.row_percentages()) {
        double sum = 0.0;
        for (double v : row) sum += v;
        CHECK(std::abs(sum - 100.0) < 1e-9);
    }
}

TEST_CASE("label-wise scores") {
    const SpanAnnotations gold{{"a", {{1, 1, "A0"}, {3, 3, "TMP"}, {5, 5, "TMP"}}}, {"b", {{1, 2, "A0"}}}};
    const SpanAnnotations pred{{"a", {{1, 1, "A0"}, {3, 3, "TMP"}}}, {"b", {{1, 2, "TMP"}, {4, 4, "TMP"}}}};
    const auto per = labelwise_f1(pred, gold);
    REQUIRE(per.size() == 2);
    // A0: 1 match, 1 predicted, 2 gold
    CHECK(per.at("A0").precision == 1.0);
    CHECK(per.at("A0").recall == 0.5);
    CHECK(per.at("A0").f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // TMP: 1 match, 3 predicted, 2 gold
    CHECK(per.at("TMP").precision == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(per.at("TMP").recall == 0.5);
    CHECK(per.at("TMP").f1 == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(per.at("A0").matched + per.at("TMP").matched == labeled_prf(pred, gold).matched);
    CHECK_FALSE(per.contains("A1"));

    const SpanAnnotations single{{"a", {{1, 1, "A0"}}}, {"b", {{2, 2, "A0"}}}};
    const SpanAnnotations single_pred{{"a", {{1, 1, "A0"}}}, {"b", {{3, 3, "A0"}}}};
    CHECK(labelwise_f1(single_pred, single).at("A0") == labeled_prf(single_pred, single));
}

TEST_CASE("id mismatches name the offending ids") {
    const SpanAnnotations gold{{"a", {}}, {"b", {}}};
    const SpanAnnotations pred{{"a", {}}, {"c", {}}};
    try {
        labeled_prf(pred, gold);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("b") != std::string::npos);
        CHECK(msg.find("c") != std::string::npos);
    }
}

TEST_CASE("report invariants and JSON round-trip") {
    const auto report = evaluate(pred_two(), gold_two());
    CHECK(report.boundary.f1 >= report.labeled.f1);
    CHECK(*report.label_accuracy ==
          static_cast<double>(report.confusion.diagonal()) / static_cast<double>(report.confusion.total()));
    const auto parsed = MetricReport::from_json(nlohmann::json::parse(report.to_json().dump()));
    CHECK(parsed.to_json() == report.to_json());
    CHECK(parsed.labeled == report.labeled);
    std::ostringstream text;
    report.write_text(text);
    CHECK(text.str().find("labeled") != std::string::npos);
    std::ostringstream csv;
    report.confusion.write_csv(csv);
    CHECK(csv.str() == "gold\\predicted,A0,A1,A2\nA0,1,0,0\nA1,0,0,1\nA2,0,0,0\n");
}

TEST_CASE("instance order does not matter") {
    Corpus a{{"x", {"a", "b"}, 1, std::vector<LabeledSpan>{{2, 2, "A0"}}},
             {"y", {"a", "b"}, 2, std::vector<LabeledSpan>{{1, 1, "A1"}}}};
    Corpus b{a[1], a[0]};
    CHECK(annotations_of(a) == annotations_of(b));
}
