#include "spanrole/adam.hpp"

#include <cmath>

#include "spanrole/errors.hpp"

namespace spanrole {

AdamState AdamState::fresh(const Tensor& like, double beta1, double beta2, double epsilon) {
    AdamState state;
    state.m = Tensor(like.rows(), like.cols());
    state.v = Tensor(like.rows(), like.cols());
    state.beta1 = beta1;
    state.beta2 = beta2;
    state.epsilon = epsilon;
    return state;
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr) {
    require(param.same_shape(grad) && param.same_shape(state.m) && param.same_shape(state.v),
            "adam_step: parameter, gradient and moment shapes must agree");
    state.t += 1;
    const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double g = grad[k];
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[k] / correction1;
        const double v_hat = state.v[k] / correction2;
        param[k] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

void Adam::step(ParameterStore& store, const GradientMap& grads, double lr) {
    for (const auto& [id, grad] : grads) {
        auto it = states_.find(id);
        if (it == states_.end()) {
            it = states_.emplace(id, AdamState::fresh(store.value(id), beta1_, beta2_, epsilon_)).first;
        }
        adam_step(store.value(id), grad, it->second, lr);
    }
}

const AdamState* Adam::state(ParamId id) const {
    const auto it = states_.find(id);
    return it == states_.end() ? nullptr : &it->second;
}

NodeId l2_penalty(Graph& graph, std::span<const NodeId> params, double lambda) {
    require(lambda >= 0.0, "l2_penalty: lambda must be non-negative");
    require(!params.empty(), "l2_penalty: no parameters");
    std::vector<NodeId> norms;
    norms.reserve(params.size());
    for (NodeId p : params) {
        norms.push_back(graph.squared_norm(p));
    }
    const NodeId total = graph.sum(graph.stack_rows(norms));
    return graph.scale(total, 0.5 * lambda);
}

double l2_penalty_value(const ParameterStore& store, double lambda) {
    double total = 0.0;
    for (ParamId id : store.ids()) {
        total += store.value(id).squared_norm();
    }
    return 0.5 * lambda * total;
}

void accumulate(GradientMap& total, const GradientMap& extra) {
    for (const auto& [id, grad] : extra) {
        auto it = total.find(id);
        if (it == total.end()) {
            total.emplace(id, grad);
        } else {
            it->second += grad;
        }
    }
}

}  // namespace spanrole
