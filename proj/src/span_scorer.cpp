#include "spanrole/span_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spanrole/errors.hpp"
#include "spanrole/init.hpp"

namespace spanrole {

std::vector<Span> enumerate_spans(int length) {
    require(length >= 1, "enumerate_spans: length must be at least 1");
    std::vector<Span> spans;
    spans.reserve(static_cast<std::size_t>(length) * static_cast<std::size_t>(length + 1) / 2);
    for (int i = 1; i <= length; ++i) {
        for (int j = i; j <= length; ++j) {
            spans.push_back({i, j});
        }
    }
    return spans;
}

std::size_t span_index(Span span, int length) {
    require(span.start >= 1 && span.start <= span.end && span.end <= length, "span out of range");
    // Spans starting before i: sum over k < i of (length - k + 1).
    const auto i = static_cast<std::size_t>(span.start);
    const auto n = static_cast<std::size_t>(length);
    const std::size_t before = (i - 1) * n - (i - 1) * (i - 2) / 2;
    return before + static_cast<std::size_t>(span.end - span.start);
}

std::size_t ScoreMatrix::label_index(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    require(it != labels.end(), "unknown label: " + label);
    return static_cast<std::size_t>(it - labels.begin());
}

LabelMatrix LabelMatrix::create(ParameterStore& store, LabelSet labels, std::size_t hidden, Rng& rng) {
    require(labels.size() > 0, "LabelMatrix: empty label set");
    const ParamId id = store.add("label_weights", glorot_uniform(labels.size(), 2 * hidden, rng));
    return {id, std::move(labels)};
}

LabelMatrix LabelMatrix::bind(const ParameterStore& store, LabelSet labels, std::size_t hidden) {
    const auto id = store.find("label_weights");
    if (!id || store.value(*id).rows() != labels.size() || store.value(*id).cols() != 2 * hidden) {
        throw DataError("label_weights missing or of the wrong shape");
    }
    return {*id, std::move(labels)};
}

Tensor span_representation(const Tensor& h, int i, int j) {
    require(i >= 1 && i <= j && j <= static_cast<int>(h.rows()), "span_representation: span out of range");
    const std::size_t d = h.cols();
    Tensor out(1, 2 * d);
    const auto hi = h.row(static_cast<std::size_t>(i - 1));
    const auto hj = h.row(static_cast<std::size_t>(j - 1));
    for (std::size_t c = 0; c < d; ++c) {
        out[c] = hi[c] + hj[c];
        out[d + c] = hi[c] - hj[c];
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> span_rows(std::span<const Span> spans) {
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    rows.reserve(spans.size());
    for (const Span& s : spans) {
        rows.emplace_back(static_cast<std::size_t>(s.start - 1), static_cast<std::size_t>(s.end - 1));
    }
    return rows;
}

NodeId span_representations(Graph& graph, NodeId h) {
    const auto spans = enumerate_spans(static_cast<int>(graph.value(h).rows()));
    return graph.span_features(h, span_rows(spans));
}

NodeId span_scores(Graph& graph, NodeId reps, NodeId weights) { return graph.matmul_nt(reps, weights); }

ScoreMatrix to_score_matrix(const Tensor& span_by_label, std::vector<std::string> labels, int length) {
    require(span_by_label.cols() == labels.size(), "to_score_matrix: label count mismatch");
    ScoreMatrix m;
    m.spans = enumerate_spans(length);
    require(span_by_label.rows() == m.spans.size(), "to_score_matrix: span count mismatch");
    m.labels = std::move(labels);
    m.length = length;
    m.values = transpose(span_by_label);
    return m;
}

ScoreMatrix score_matrix(const Tensor& h, const Tensor& weights, std::vector<std::string> labels) {
    require(h.rows() >= 1, "score_matrix: empty sentence");
    require(weights.cols() == 2 * h.cols(), "score_matrix: weight width must be 2 * hidden");
    Graph graph;
    const NodeId reps = span_representations(graph, graph.constant(h));
    const NodeId scores = span_scores(graph, reps, graph.constant(weights));
    return to_score_matrix(graph.value(scores), std::move(labels), static_cast<int>(h.rows()));
}

std::vector<double> span_log_softmax(const ScoreMatrix& matrix, std::size_t label) {
    require(label < matrix.labels.size(), "span_log_softmax: unknown label");
    const auto row = matrix.values.row(label);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double v : row) {
        total += std::exp(v - peak);
    }
    const double normalizer = peak + std::log(total);
    std::vector<double> out(row.begin(), row.end());
    for (double& v : out) {
        v -= normalizer;
    }
    return out;
}

std::vector<double> span_log_softmax(const ScoreMatrix& matrix, const std::string& label) {
    return span_log_softmax(matrix, matrix.label_index(label));
}

std::vector<Target> training_targets(const PredicateInstance& instance, const LabelSet& labels) {
    require(instance.gold.has_value(), "training_targets: instance has no gold spans");
    const int length = instance.length();
    std::vector<Target> targets;
    std::vector<bool> has_gold(labels.size(), false);
    for (const auto& s : *instance.gold) {
        const std::size_t label = labels.index(s.label);
        targets.push_back({span_index(s.span(), length), label});
        has_gold[label] = true;
    }
    const std::size_t null_span = span_index({instance.predicate, instance.predicate}, length);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (!has_gold[r]) {
            targets.push_back({null_span, r});
        }
    }
    return targets;
}

double sample_loss(const ScoreMatrix& matrix, std::span<const Target> targets) {
    std::vector<std::vector<double>> cache(matrix.labels.size());
    double loss = 0.0;
    for (const Target& t : targets) {
        require(t.label < matrix.labels.size() && t.span < matrix.spans.size(), "sample_loss: target outside S");
        if (cache[t.label].empty()) {
            cache[t.label] = span_log_softmax(matrix, t.label);
        }
        loss -= cache[t.label][t.span];
    }
    return loss;
}

NodeId sample_loss(Graph& graph, NodeId span_by_label, std::span<const Target> targets) {
    const Tensor& scores = graph.value(span_by_label);
    require(!targets.empty(), "sample_loss: no targets");
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    std::vector<std::pair<std::size_t, std::size_t>> normalizers;
    for (const Target& t : targets) {
        require(t.span < scores.rows() && t.label < scores.cols(), "sample_loss: target outside S");
        cells.emplace_back(t.span, t.label);
        normalizers.emplace_back(0, t.label);
    }
    const NodeId lse = graph.log_sum_exp_cols(span_by_label);
    const NodeId picked = graph.sum(graph.pick(span_by_label, std::move(cells)));
    const NodeId partition = graph.sum(graph.pick(lse, std::move(normalizers)));
    return graph.sub(partition, picked);
}

}  // namespace spanrole
