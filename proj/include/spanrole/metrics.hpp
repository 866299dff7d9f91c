#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spanrole/corpus.hpp"

namespace spanrole {

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matched = 0;
    std::size_t predicted = 0;
    std::size_t gold = 0;

    // Zero denominators give 0 for the affected ratio.
    static PrfResult from_counts(std::size_t matched, std::size_t predicted, std::size_t gold);
    friend bool operator==(const PrfResult&, const PrfResult&) = default;
};

// Span sets keyed by PredicateInstance::key().
using SpanAnnotations = std::map<std::string, std::vector<LabeledSpan>>;

// Gold spans of every instance; instances without gold count as empty.
SpanAnnotations annotations_of(const Corpus& corpus);

// Throws DataError naming every key present on only one side.
void check_aligned(const SpanAnnotations& predicted, const SpanAnnotations& gold);

// Exact <i, j, r> matches, micro-averaged.
PrfResult labeled_prf(const SpanAnnotations& predicted, const SpanAnnotations& gold);
// Matches on (i, j) only, one-to-one.
PrfResult boundary_prf(const SpanAnnotations& predicted, const SpanAnnotations& gold);
// Fraction of boundary-matched pairs whose labels agree; nullopt without any
// boundary match.
std::optional<double> label_accuracy(const SpanAnnotations& predicted, const SpanAnnotations& gold);

struct ConfusionMatrix {
    std::vector<std::string> labels;              // sorted union of labels seen in matched pairs
    std::vector<std::vector<std::size_t>> counts;  // [gold][predicted]

    std::size_t count(const std::string& gold, const std::string& predicted) const;
    std::size_t total() const;
    std::size_t diagonal() const;
    // Each nonempty row scaled to sum to 100.
    std::vector<std::vector<double>> row_percentages() const;
    void write_csv(std::ostream& out) const;
};

ConfusionMatrix confusion_matrix(const SpanAnnotations& predicted, const SpanAnnotations& gold);

// Per-label labeled P/R/F1. Labels absent from both sides are omitted.
std::map<std::string, PrfResult> labelwise_f1(const SpanAnnotations& predicted, const SpanAnnotations& gold);

struct MetricReport {
    PrfResult labeled;
    PrfResult boundary;
    std::optional<double> label_accuracy;
    std::map<std::string, PrfResult> labelwise;
    ConfusionMatrix confusion;

    nlohmann::json to_json() const;
    static MetricReport from_json(const nlohmann::json& j);
    void write_text(std::ostream& out) const;
};

MetricReport evaluate(const SpanAnnotations& predicted, const SpanAnnotations& gold);

}  // namespace spanrole
