#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "spanrole/graph.hpp"
#include "spanrole/parameters.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

struct AdamState {
    Tensor m;
    Tensor v;
    std::int64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState fresh(const Tensor& like, double beta1 = 0.9, double beta2 = 0.999,
                           double epsilon = 1e-8);
};

// One bias-corrected Adam update of `param` in place.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr);

// Adam over a whole ParameterStore. Parameters absent from a gradient map are
// left untouched for that step.
class Adam {
public:
    explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
        : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

    void step(ParameterStore& store, const GradientMap& grads, double lr);
    const AdamState* state(ParamId id) const;

private:
    double beta1_;
    double beta2_;
    double epsilon_;
    std::map<ParamId, AdamState> states_;
};

// (lambda / 2) * sum of squared entries of every node in `params`.
NodeId l2_penalty(Graph& graph, std::span<const NodeId> params, double lambda);
double l2_penalty_value(const ParameterStore& store, double lambda);

// Adds `extra` into `total`, allocating entries as needed.
void accumulate(GradientMap& total, const GradientMap& extra);

}  // namespace spanrole
