#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "spanrole/corpus.hpp"
#include "spanrole/span_scorer.hpp"

namespace spanrole {

struct Candidate {
    int start = 1;
    int end = 1;
    std::size_t label = 0;
    double score = 0.0;

    Span span() const noexcept { return {start, end}; }
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Labels limited to a single span per predicate.
struct CoreLabelSet {
    std::set<std::string> names;

    static CoreLabelSet defaults() { return {default_core_labels()}; }
    bool contains(const std::string& label) const { return names.contains(label); }
};

// Every (i, j, r, score) cell, label-major.
std::vector<Candidate> flatten(const ScoreMatrix& matrix);

// Drops candidates whose span covers the predicate (including the predicate
// span itself) and candidates scoring strictly below their label's predicate
// span score. `candidates` must contain every (p, p, r) cell.
std::vector<Candidate> filter_candidates(const std::vector<Candidate>& candidates, int predicate);

// Descending score; ties by label index, then (start, end).
void sort_candidates(std::vector<Candidate>& candidates);

// Greedy selection under the overlap and one-span-per-core-label constraints.
// The result is ordered by position.
std::vector<LabeledSpan> greedy_select(const ScoreMatrix& matrix, int predicate, const CoreLabelSet& core);

// Per label, the highest scoring span (first in canonical order on ties);
// labels whose best span is the predicate span produce no output. The result
// may contain overlapping spans.
std::vector<LabeledSpan> argmax_decode(const ScoreMatrix& matrix, int predicate);

}  // namespace spanrole
