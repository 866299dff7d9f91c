#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spanrole/corpus.hpp"
#include "spanrole/graph.hpp"
#include "spanrole/labels.hpp"
#include "spanrole/parameters.hpp"
#include "spanrole/rng.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

// All spans (i, j), 1 <= i <= j <= length, in lexicographic order.
std::vector<Span> enumerate_spans(int length);
// Position of a span in enumerate_spans(length).
std::size_t span_index(Span span, int length);

// F(i, j, r) for every label (rows) and every span of one sentence (columns,
// canonical order).
struct ScoreMatrix {
    std::vector<std::string> labels;
    std::vector<Span> spans;
    int length = 0;
    Tensor values;  // |R| x |S|

    double score(std::size_t label, std::size_t span) const { return values(label, span); }
    double score(std::size_t label, Span span) const { return values(label, span_index(span, length)); }
    std::size_t label_index(const std::string& label) const;

    friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

// Labeling weights W: one 2d-wide row per label.
struct LabelMatrix {
    ParamId weights;
    LabelSet labels;

    static LabelMatrix create(ParameterStore& store, LabelSet labels, std::size_t hidden, Rng& rng);
    static LabelMatrix bind(const ParameterStore& store, LabelSet labels, std::size_t hidden);
};

// [h_i + h_j ; h_i - h_j] with 1-based i, j over the rows of h.
Tensor span_representation(const Tensor& h, int i, int j);

// 0-based row pairs for Graph::span_features.
std::vector<std::pair<std::size_t, std::size_t>> span_rows(std::span<const Span> spans);

// |S| x 2d node of span representations for every span of the sentence.
NodeId span_representations(Graph& graph, NodeId h);

// |S| x |R| node of scores from span representations and W.
NodeId span_scores(Graph& graph, NodeId reps, NodeId weights);

// Packs a |S| x |R| score tensor into a ScoreMatrix.
ScoreMatrix to_score_matrix(const Tensor& span_by_label, std::vector<std::string> labels, int length);

// Score matrix straight from base features and W (no graph bookkeeping kept).
ScoreMatrix score_matrix(const Tensor& h, const Tensor& weights, std::vector<std::string> labels);

// log P(i, j | r) for every span, max-shifted.
std::vector<double> span_log_softmax(const ScoreMatrix& matrix, std::size_t label);
std::vector<double> span_log_softmax(const ScoreMatrix& matrix, const std::string& label);

struct Target {
    std::size_t span;   // index into enumerate_spans(length)
    std::size_t label;  // index into the label set
    friend auto operator<=>(const Target&, const Target&) = default;
};

// Gold spans plus the predicate's own span as the target of every label that
// has no gold span. Unknown labels are a contract violation.
std::vector<Target> training_targets(const PredicateInstance& instance, const LabelSet& labels);

// -sum over targets of log P(i, j | r).
double sample_loss(const ScoreMatrix& matrix, std::span<const Target> targets);
NodeId sample_loss(Graph& graph, NodeId span_by_label, std::span<const Target> targets);

}  // namespace spanrole
