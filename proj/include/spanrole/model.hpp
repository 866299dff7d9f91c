#pragma once

#include <memory>
#include <vector>

#include "spanrole/config.hpp"
#include "spanrole/corpus.hpp"
#include "spanrole/decode.hpp"
#include "spanrole/encoder.hpp"
#include "spanrole/features.hpp"
#include "spanrole/graph.hpp"
#include "spanrole/labels.hpp"
#include "spanrole/parameters.hpp"
#include "spanrole/span_scorer.hpp"

namespace spanrole {

enum class DecodeMode { Greedy, Argmax };

// Anything that scores every (span, label) pair of a sentence through a
// differentiable graph over its own ParameterStore.
class SpanModel {
public:
    virtual ~SpanModel() = default;

    virtual const LabelSet& labels() const = 0;
    virtual ParameterStore& parameters() = 0;
    virtual const ParameterStore& parameters() const = 0;
    // |S| x |R| score node. `rng` drives dropout and is only used when `train`.
    virtual NodeId build_scores(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const = 0;

    ScoreMatrix scores(const PredicateInstance& instance) const;
    std::vector<LabeledSpan> predict(const PredicateInstance& instance, DecodeMode mode) const;
    CoreLabelSet core_labels() const { return {labels().core_names()}; }
};

// Word + predicate-mark inputs, alternating LSTM stack, span features and a
// linear labeling layer.
class SrlModel final : public SpanModel {
public:
    // Fresh parameters drawn from `rng`.
    SrlModel(TrainConfig config, LabelSet labels, std::shared_ptr<const WordInputs> inputs, Rng& rng);
    // Wraps existing parameters (e.g. loaded from a checkpoint).
    SrlModel(TrainConfig config, LabelSet labels, std::shared_ptr<const WordInputs> inputs, ParameterStore params);

    struct Forward {
        NodeId inputs;
        NodeId hidden;  // T x d
        NodeId reps;    // |S| x 2d
        NodeId scores;  // |S| x |R|
    };
    Forward forward(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const;

    const LabelSet& labels() const override { return label_matrix_.labels; }
    ParameterStore& parameters() override { return params_; }
    const ParameterStore& parameters() const override { return params_; }
    NodeId build_scores(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const override;

    // Inference-mode base features and span representations.
    Tensor encode(const PredicateInstance& instance) const;
    Tensor span_reps(const PredicateInstance& instance) const;

    const TrainConfig& config() const noexcept { return config_; }
    const WordInputs& inputs() const noexcept { return *inputs_; }
    std::shared_ptr<const WordInputs> shared_inputs() const noexcept { return inputs_; }
    const EncoderStack& encoder() const noexcept { return encoder_; }
    const MarkEmbedding& marks() const noexcept { return marks_; }
    const LabelMatrix& label_matrix() const noexcept { return label_matrix_; }
    std::size_t rep_width() const noexcept { return 2 * config_.hidden; }

private:
    TrainConfig config_;
    std::shared_ptr<const WordInputs> inputs_;
    ParameterStore params_;
    MarkEmbedding marks_;
    EncoderStack encoder_;
    LabelMatrix label_matrix_;
};

}  // namespace spanrole
