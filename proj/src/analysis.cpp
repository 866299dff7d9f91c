#include "spanrole/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "spanrole/errors.hpp"

namespace spanrole {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "cosine_similarity: width mismatch");
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot(a, b) / (na * nb);
}

std::vector<std::pair<std::size_t, double>> nearest_neighbors(std::span<const double> query, const Tensor& reference,
                                                              std::size_t k) {
    std::vector<std::pair<std::size_t, double>> ranked;
    ranked.reserve(reference.rows());
    for (std::size_t r = 0; r < reference.rows(); ++r) {
        ranked.emplace_back(r, cosine_similarity(query, reference.row(r)));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    ranked.resize(std::min(k, ranked.size()));
    return ranked;
}

NeighborReport analyze_neighbors(const SrlModel& model, const Corpus& query, const Corpus& reference, std::size_t k,
                                 DecodeMode mode) {
    require(k > 0, "analyze_neighbors: k must be positive");
    std::vector<Neighbor> pool;
    std::vector<double> rows;
    for (const auto& instance : reference) {
        if (!instance.gold || instance.gold->empty()) continue;
        const Tensor reps = model.span_reps(instance);
        for (const auto& s : *instance.gold) {
            const auto row = reps.row(span_index(s.span(), instance.length()));
            rows.insert(rows.end(), row.begin(), row.end());
            pool.push_back({instance.key(), s, 0.0});
        }
    }

    NeighborReport report;
    report.truncated = k > pool.size();
    if (pool.empty()) {
        for (const auto& instance : query) {
            for (const auto& s : model.predict(instance, mode)) report.queries.push_back({instance.key(), s, {}});
        }
        return report;
    }
    const Tensor bank(pool.size(), model.rep_width(), std::move(rows));
    for (const auto& instance : query) {
        const auto predicted = model.predict(instance, mode);
        if (predicted.empty()) continue;
        const Tensor reps = model.span_reps(instance);
        for (const auto& s : predicted) {
            SpanNeighbors entry{instance.key(), s, {}};
            for (const auto& [index, sim] : nearest_neighbors(reps.row(span_index(s.span(), instance.length())), bank, k)) {
                Neighbor n = pool[index];
                n.similarity = sim;
                entry.neighbors.push_back(std::move(n));
            }
            report.queries.push_back(std::move(entry));
        }
    }
    return report;
}

nlohmann::json to_json(const SpanNeighbors& entry) {
    nlohmann::json neighbors = nlohmann::json::array();
    for (const auto& n : entry.neighbors) {
        neighbors.push_back({{"instance", n.instance},
                             {"span", {n.span.start, n.span.end, n.span.label}},
                             {"similarity", n.similarity}});
    }
    return {{"instance", entry.instance},
            {"span", {entry.span.start, entry.span.end, entry.span.label}},
            {"neighbors", std::move(neighbors)}};
}

void write_label_embeddings(std::ostream& out, const LabelSet& labels, const Tensor& weights) {
    require(weights.rows() == labels.size(), "write_label_embeddings: one row per label is required");
    const auto precision = out.precision(17);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out << labels.name(r);
        for (double v : weights.row(r)) out << ',' << v;
        out << '\n';
    }
    out.precision(precision);
}

}  // namespace spanrole
