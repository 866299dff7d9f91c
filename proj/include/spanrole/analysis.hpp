#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spanrole/corpus.hpp"
#include "spanrole/model.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

// 0 when either vector is all zeros.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Rows of `reference` ranked by cosine similarity to `query`, best first;
// ties keep row order. At most k entries.
std::vector<std::pair<std::size_t, double>> nearest_neighbors(std::span<const double> query, const Tensor& reference,
                                                              std::size_t k);

struct Neighbor {
    std::string instance;  // PredicateInstance::key()
    LabeledSpan span;      // gold span of the reference corpus
    double similarity = 0.0;
};

struct SpanNeighbors {
    std::string instance;
    LabeledSpan span;  // predicted span
    std::vector<Neighbor> neighbors;
};

struct NeighborReport {
    std::vector<SpanNeighbors> queries;
    bool truncated = false;  // k exceeded the number of reference spans
};

// Predicted spans of `query` against the gold spans of `reference`, both
// represented by the model's span features.
NeighborReport analyze_neighbors(const SrlModel& model, const Corpus& query, const Corpus& reference, std::size_t k,
                                 DecodeMode mode = DecodeMode::Greedy);

nlohmann::json to_json(const SpanNeighbors& entry);

// One `label,v1,...,vn` row per label.
void write_label_embeddings(std::ostream& out, const LabelSet& labels, const Tensor& weights);

}  // namespace spanrole
