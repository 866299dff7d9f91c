#include "spanrole/model.hpp"

#include "spanrole/errors.hpp"
#include "spanrole/init.hpp"

namespace spanrole {

ScoreMatrix SpanModel::scores(const PredicateInstance& instance) const {
    Graph graph;
    const NodeId node = build_scores(graph, instance, false, nullptr);
    return to_score_matrix(graph.value(node), labels().names(), instance.length());
}

std::vector<LabeledSpan> SpanModel::predict(const PredicateInstance& instance, DecodeMode mode) const {
    const ScoreMatrix matrix = scores(instance);
    if (mode == DecodeMode::Argmax) {
        return argmax_decode(matrix, instance.predicate);
    }
    return greedy_select(matrix, instance.predicate, core_labels());
}

SrlModel::SrlModel(TrainConfig config, LabelSet labels, std::shared_ptr<const WordInputs> inputs, Rng& rng)
    : config_(std::move(config)), inputs_(std::move(inputs)) {
    config_.validate();
    require(inputs_ != nullptr, "SrlModel: word inputs are required");
    marks_ = MarkEmbedding::create(params_, config_.mark_dim, rng);
    encoder_ = EncoderStack::create(params_, inputs_->dim() + config_.mark_dim, config_.hidden, config_.layers, rng);
    label_matrix_ = LabelMatrix::create(params_, std::move(labels), config_.hidden, rng);
}

SrlModel::SrlModel(TrainConfig config, LabelSet labels, std::shared_ptr<const WordInputs> inputs,
                   ParameterStore params)
    : config_(std::move(config)), inputs_(std::move(inputs)), params_(std::move(params)) {
    config_.validate();
    require(inputs_ != nullptr, "SrlModel: word inputs are required");
    const auto mark = params_.find("mark_embedding");
    if (!mark || params_.value(*mark).rows() != 2 || params_.value(*mark).cols() != config_.mark_dim) {
        throw DataError("mark_embedding missing or of the wrong shape");
    }
    marks_ = MarkEmbedding{*mark, config_.mark_dim};
    encoder_ = EncoderStack::bind(params_, inputs_->dim() + config_.mark_dim, config_.hidden, config_.layers);
    label_matrix_ = LabelMatrix::bind(params_, std::move(labels), config_.hidden);
}

SrlModel::Forward SrlModel::forward(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const {
    require(instance.predicate >= 1 && instance.predicate <= instance.length(), "predicate index out of range");
    Tensor words = inputs_->vectors(instance);
    if (train && inputs_->contextual() && config_.contextual_dropout > 0.0) {
        require(rng != nullptr, "forward: dropout in training needs an rng");
        words = hadamard(words, dropout_mask(words.rows(), words.cols(), 1.0 - config_.contextual_dropout, *rng));
    }
    Forward out{};
    out.inputs = assemble_inputs(graph, words, instance.predicate, graph.parameter(params_, marks_.table));
    out.hidden = encoder_.encode(graph, params_, out.inputs, EncoderOptions{train, config_.lstm_dropout, rng});
    out.reps = span_representations(graph, out.hidden);
    out.scores = span_scores(graph, out.reps, graph.parameter(params_, label_matrix_.weights));
    return out;
}

NodeId SrlModel::build_scores(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const {
    return forward(graph, instance, train, rng).scores;
}

Tensor SrlModel::encode(const PredicateInstance& instance) const {
    Graph graph;
    return graph.value(forward(graph, instance, false, nullptr).hidden);
}

Tensor SrlModel::span_reps(const PredicateInstance& instance) const {
    Graph graph;
    return graph.value(forward(graph, instance, false, nullptr).reps);
}

}  // namespace spanrole
