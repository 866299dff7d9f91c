#include "spanrole/decode.hpp"

#include <algorithm>
#include <optional>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

void order_by_position(std::vector<LabeledSpan>& spans) { std::sort(spans.begin(), spans.end()); }

}  // namespace

std::vector<Candidate> flatten(const ScoreMatrix& matrix) {
    std::vector<Candidate> out;
    out.reserve(matrix.values.size());
    for (std::size_t r = 0; r < matrix.labels.size(); ++r) {
        for (std::size_t s = 0; s < matrix.spans.size(); ++s) {
            out.push_back({matrix.spans[s].start, matrix.spans[s].end, r, matrix.values(r, s)});
        }
    }
    return out;
}

std::vector<Candidate> filter_candidates(const std::vector<Candidate>& candidates, int predicate) {
    require(predicate >= 1, "filter_candidates: predicate index out of range");
    std::vector<std::optional<double>> null_score;
    int length = 0;
    for (const Candidate& c : candidates) {
        length = std::max(length, c.end);
        if (c.start == predicate && c.end == predicate) {
            if (null_score.size() <= c.label) {
                null_score.resize(c.label + 1);
            }
            null_score[c.label] = c.score;
        }
    }
    require(predicate <= length, "filter_candidates: predicate index out of range");
    std::vector<Candidate> kept;
    for (const Candidate& c : candidates) {
        if (covers(c.span(), predicate)) {
            continue;
        }
        require(c.label < null_score.size() && null_score[c.label].has_value(),
                "filter_candidates: missing predicate-span score for a label");
        if (c.score < *null_score[c.label]) {
            continue;
        }
        kept.push_back(c);
    }
    return kept;
}

void sort_candidates(std::vector<Candidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.label != b.label) return a.label < b.label;
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
}

std::vector<LabeledSpan> greedy_select(const ScoreMatrix& matrix, int predicate, const CoreLabelSet& core) {
    require(predicate >= 1 && predicate <= matrix.length, "greedy_select: predicate index out of range");
    auto candidates = filter_candidates(flatten(matrix), predicate);
    sort_candidates(candidates);

    std::vector<LabeledSpan> selected;
    std::vector<bool> used_core(matrix.labels.size(), false);
    for (const Candidate& c : candidates) {
        if (used_core[c.label]) {
            continue;
        }
        const bool clash = std::any_of(selected.begin(), selected.end(),
                                       [&](const LabeledSpan& s) { return overlaps(s.span(), c.span()); });
        if (clash) {
            continue;
        }
        selected.push_back({c.start, c.end, matrix.labels[c.label]});
        if (core.contains(matrix.labels[c.label])) {
            used_core[c.label] = true;
        }
    }
    order_by_position(selected);
    return selected;
}

std::vector<LabeledSpan> argmax_decode(const ScoreMatrix& matrix, int predicate) {
    require(predicate >= 1 && predicate <= matrix.length, "argmax_decode: predicate index out of range");
    std::vector<LabeledSpan> out;
    for (std::size_t r = 0; r < matrix.labels.size(); ++r) {
        const auto row = matrix.values.row(r);
        const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        const Span span = matrix.spans[best];
        if (span.start == predicate && span.end == predicate) {
            continue;
        }
        out.push_back({span.start, span.end, matrix.labels[r]});
    }
    order_by_position(out);
    return out;
}

}  // namespace spanrole
