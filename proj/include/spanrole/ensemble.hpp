#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spanrole/model.hpp"

namespace spanrole {

// Throws DataError unless every base shares hidden size and label set.
void check_compatible(std::span<const std::shared_ptr<const SrlModel>> bases);

// Mixture of frozen base models. Span representations of the bases are mixed
// by softmax(a), passed through W_moe_s and scored by W_moe.
class EnsembleModel final : public SpanModel {
public:
    // W_moe_s = I, a = 0, W_moe = mean of the base label rows.
    explicit EnsembleModel(std::vector<std::shared_ptr<const SrlModel>> bases);
    // Existing ensemble parameters ("moe.mix", "moe.logits", "moe.label_weights").
    EnsembleModel(std::vector<std::shared_ptr<const SrlModel>> bases, ParameterStore params);

    const LabelSet& labels() const override { return bases_.front()->labels(); }
    ParameterStore& parameters() override { return params_; }
    const ParameterStore& parameters() const override { return params_; }
    NodeId build_scores(Graph& graph, const PredicateInstance& instance, bool train, Rng* rng) const override;

    // |S| x 2d combined representation node from one |S| x 2d node per base.
    NodeId combine(Graph& graph, std::span<const NodeId> reps) const;
    Tensor combine_span_reps(std::span<const Tensor> reps) const;
    // W_moe[r] . h_moe for a 1 x 2d row.
    double ensemble_score(const Tensor& h_moe, std::size_t label) const;
    // softmax(a) as a 1 x M row.
    Tensor mixture_weights() const;

    std::size_t size() const noexcept { return bases_.size(); }
    const std::vector<std::shared_ptr<const SrlModel>>& bases() const noexcept { return bases_; }
    ParamId mix_id() const noexcept { return mix_; }
    ParamId logits_id() const noexcept { return logits_; }
    ParamId label_weights_id() const noexcept { return weights_; }

private:
    void bind();

    std::vector<std::shared_ptr<const SrlModel>> bases_;
    ParameterStore params_;
    ParamId mix_{};
    ParamId logits_{};
    ParamId weights_{};
};

}  // namespace spanrole
