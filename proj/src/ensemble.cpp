#include "spanrole/ensemble.hpp"

#include "spanrole/errors.hpp"

namespace spanrole {

void check_compatible(std::span<const std::shared_ptr<const SrlModel>> bases) {
    if (bases.empty()) {
        throw DataError("an ensemble needs at least one base model");
    }
    const SrlModel& first = *bases.front();
    for (std::size_t m = 1; m < bases.size(); ++m) {
        const SrlModel& other = *bases[m];
        if (other.config().hidden != first.config().hidden) {
            throw DataError("base model " + std::to_string(m) + " has hidden size " +
                            std::to_string(other.config().hidden) + ", expected " +
                            std::to_string(first.config().hidden));
        }
        if (!(other.labels() == first.labels())) {
            throw DataError("base model " + std::to_string(m) + " has a different label set");
        }
    }
}

EnsembleModel::EnsembleModel(std::vector<std::shared_ptr<const SrlModel>> bases) : bases_(std::move(bases)) {
    check_compatible(bases_);
    const std::size_t width = bases_.front()->rep_width();
    const std::size_t labels = bases_.front()->labels().size();
    Tensor mean(labels, width, 0.0);
    for (const auto& base : bases_) {
        mean += base->parameters().value(base->label_matrix().weights);
    }
    mean *= 1.0 / static_cast<double>(bases_.size());
    params_.add("moe.mix", Tensor::identity(width));
    params_.add("moe.logits", Tensor(1, bases_.size(), 0.0));
    params_.add("moe.label_weights", std::move(mean));
    bind();
}

EnsembleModel::EnsembleModel(std::vector<std::shared_ptr<const SrlModel>> bases, ParameterStore params)
    : bases_(std::move(bases)), params_(std::move(params)) {
    check_compatible(bases_);
    bind();
}

void EnsembleModel::bind() {
    const std::size_t width = bases_.front()->rep_width();
    auto lookup = [&](const char* name, std::size_t rows, std::size_t cols) {
        const auto id = params_.find(name);
        if (!id || params_.value(*id).rows() != rows || params_.value(*id).cols() != cols) {
            throw DataError(std::string("ensemble parameter ") + name + " missing or of the wrong shape");
        }
        return *id;
    };
    mix_ = lookup("moe.mix", width, width);
    logits_ = lookup("moe.logits", 1, bases_.size());
    weights_ = lookup("moe.label_weights", labels().size(), width);
}

NodeId EnsembleModel::combine(Graph& graph, std::span<const NodeId> reps) const {
    require(reps.size() == bases_.size(), "combine: one representation per base is required");
    const NodeId alpha = graph.softmax(graph.parameter(params_, logits_));
    NodeId total{};
    for (std::size_t m = 0; m < reps.size(); ++m) {
        require(graph.value(reps[m]).cols() == bases_.front()->rep_width(), "combine: representation width mismatch");
        const NodeId term = graph.scale_by_entry(reps[m], alpha, m);
        total = m == 0 ? term : graph.add(total, term);
    }
    return graph.matmul_nt(total, graph.parameter(params_, mix_));
}

Tensor EnsembleModel::combine_span_reps(std::span<const Tensor> reps) const {
    Graph graph;
    std::vector<NodeId> nodes;
    for (const auto& r : reps) nodes.push_back(graph.constant(r));
    return graph.value(combine(graph, nodes));
}

double EnsembleModel::ensemble_score(const Tensor& h_moe, std::size_t label) const {
    require(label < labels().size(), "ensemble_score: unknown label");
    require(h_moe.size() == bases_.front()->rep_width(), "ensemble_score: width mismatch");
    return dot(params_.value(weights_).row(label), h_moe.values());
}

Tensor EnsembleModel::mixture_weights() const {
    Graph graph;
    return graph.value(graph.softmax(graph.parameter(params_, logits_)));
}

NodeId EnsembleModel::build_scores(Graph& graph, const PredicateInstance& instance, bool, Rng*) const {
    std::vector<NodeId> reps;
    reps.reserve(bases_.size());
    for (const auto& base : bases_) {
        reps.push_back(graph.constant(base->span_reps(instance)));
    }
    const NodeId h_moe = combine(graph, reps);
    return span_scores(graph, h_moe, graph.parameter(params_, weights_));
}

}  // namespace spanrole
