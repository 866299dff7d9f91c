#include "spanrole/encoder.hpp"

#include <algorithm>
#include <string>

#include "spanrole/errors.hpp"
#include "spanrole/init.hpp"

namespace spanrole {
namespace {

// Four independently drawn orthonormal gate blocks stacked vertically.
Tensor gate_blocks(std::size_t hidden, std::size_t width, Rng& rng) {
    Tensor out(4 * hidden, width);
    for (std::size_t gate = 0; gate < 4; ++gate) {
        const Tensor block = orthonormal_init(hidden, width, rng);
        std::copy(block.values().begin(), block.values().end(), out.row(gate * hidden).begin());
    }
    return out;
}

ParamId lookup(const ParameterStore& store, const std::string& name, std::size_t rows, std::size_t cols) {
    const auto id = store.find(name);
    if (!id) {
        throw DataError("missing parameter " + name);
    }
    if (store.value(*id).rows() != rows || store.value(*id).cols() != cols) {
        throw DataError("parameter " + name + " has the wrong shape");
    }
    return *id;
}

LstmState step(Graph& graph, const ParameterStore& store, const LstmLayer& layer, NodeId preactivation,
               std::optional<LstmState> previous) {
    const std::size_t d = layer.hidden;
    NodeId gates = preactivation;
    if (previous) {
        const NodeId recurrent = graph.parameter(store, layer.recurrent_weights);
        gates = graph.add(gates, graph.matmul_nt(previous->h, recurrent));
    }
    const NodeId sig = graph.sigmoid(graph.slice_cols(gates, 0, 3 * d));
    const NodeId input_gate = graph.slice_cols(sig, 0, d);
    const NodeId output_gate = graph.slice_cols(sig, 2 * d, d);
    const NodeId candidate = graph.tanh(graph.slice_cols(gates, 3 * d, d));
    NodeId cell = graph.mul(input_gate, candidate);
    if (previous) {
        const NodeId forget_gate = graph.slice_cols(sig, d, d);
        cell = graph.add(cell, graph.mul(forget_gate, previous->c));
    }
    const NodeId hidden = graph.mul(output_gate, graph.tanh(cell));
    return {hidden, cell};
}

std::string layer_prefix(std::size_t k) { return "encoder.layer" + std::to_string(k + 1); }

}  // namespace

LstmLayer LstmLayer::create(ParameterStore& store, const std::string& prefix, std::size_t input_width,
                            std::size_t hidden, Direction direction, Rng& rng) {
    require(input_width > 0 && hidden > 0, "LstmLayer: widths must be positive");
    LstmLayer layer;
    layer.input_weights = store.add(prefix + ".input_weights", gate_blocks(hidden, input_width, rng));
    layer.recurrent_weights = store.add(prefix + ".recurrent_weights", gate_blocks(hidden, hidden, rng));
    layer.bias = store.add(prefix + ".bias", Tensor(1, 4 * hidden));
    layer.direction = direction;
    layer.input_width = input_width;
    layer.hidden = hidden;
    return layer;
}

LstmLayer LstmLayer::bind(const ParameterStore& store, const std::string& prefix, std::size_t input_width,
                          std::size_t hidden, Direction direction) {
    LstmLayer layer;
    layer.input_weights = lookup(store, prefix + ".input_weights", 4 * hidden, input_width);
    layer.recurrent_weights = lookup(store, prefix + ".recurrent_weights", 4 * hidden, hidden);
    layer.bias = lookup(store, prefix + ".bias", 1, 4 * hidden);
    layer.direction = direction;
    layer.input_width = input_width;
    layer.hidden = hidden;
    return layer;
}

LstmState lstm_cell(Graph& graph, const ParameterStore& store, const LstmLayer& layer, NodeId x_t,
                    std::optional<LstmState> previous) {
    const Tensor& x = graph.value(x_t);
    require(x.rows() == 1 && x.cols() == layer.input_width, "lstm_cell: input width mismatch");
    if (previous) {
        require(graph.value(previous->h).cols() == layer.hidden && graph.value(previous->c).cols() == layer.hidden,
                "lstm_cell: state width mismatch");
    }
    const NodeId pre = graph.add_row(graph.matmul_nt(x_t, graph.parameter(store, layer.input_weights)),
                                     graph.parameter(store, layer.bias));
    return step(graph, store, layer, pre, previous);
}

EncoderStack EncoderStack::create(ParameterStore& store, std::size_t input_width, std::size_t hidden,
                                  std::size_t layers, Rng& rng) {
    require(layers >= 1, "EncoderStack: need at least one layer");
    EncoderStack stack;
    stack.input_width_ = input_width;
    stack.hidden_ = hidden;
    std::size_t width = input_width;
    for (std::size_t k = 0; k < layers; ++k) {
        const Direction dir = k % 2 == 0 ? Direction::LeftToRight : Direction::RightToLeft;
        stack.layers_.push_back(LstmLayer::create(store, layer_prefix(k), width, hidden, dir, rng));
        stack.projections_.push_back(
            store.add(layer_prefix(k) + ".projection", glorot_uniform(hidden, width + hidden, rng)));
        width = hidden;
    }
    return stack;
}

EncoderStack EncoderStack::bind(const ParameterStore& store, std::size_t input_width, std::size_t hidden,
                                std::size_t layers) {
    require(layers >= 1, "EncoderStack: need at least one layer");
    EncoderStack stack;
    stack.input_width_ = input_width;
    stack.hidden_ = hidden;
    std::size_t width = input_width;
    for (std::size_t k = 0; k < layers; ++k) {
        const Direction dir = k % 2 == 0 ? Direction::LeftToRight : Direction::RightToLeft;
        stack.layers_.push_back(LstmLayer::bind(store, layer_prefix(k), width, hidden, dir));
        stack.projections_.push_back(lookup(store, layer_prefix(k) + ".projection", hidden, width + hidden));
        width = hidden;
    }
    return stack;
}

NodeId EncoderStack::run_layer(Graph& graph, const ParameterStore& store, std::size_t k, NodeId inputs) const {
    const LstmLayer& layer = layers_.at(k);
    const Tensor& x = graph.value(inputs);
    require(x.cols() == layer.input_width, "run_layer: input width mismatch");
    const std::size_t length = x.rows();
    const NodeId pre = graph.add_row(graph.matmul_nt(inputs, graph.parameter(store, layer.input_weights)),
                                     graph.parameter(store, layer.bias));
    std::vector<NodeId> hidden(length);
    std::optional<LstmState> state;
    for (std::size_t n = 0; n < length; ++n) {
        const std::size_t t = layer.direction == Direction::LeftToRight ? n : length - 1 - n;
        state = step(graph, store, layer, graph.slice_rows(pre, t, 1), state);
        hidden[t] = state->h;
    }
    return graph.stack_rows(hidden);
}

NodeId EncoderStack::encode(Graph& graph, const ParameterStore& store, NodeId inputs,
                            const EncoderOptions& options) const {
    const Tensor& x = graph.value(inputs);
    if (x.rows() == 0 || x.empty()) {
        throw DataError("cannot encode an empty sequence");
    }
    require(x.cols() == input_width_, "encode: input width mismatch");
    const bool drop = options.train && options.dropout > 0.0;
    require(!drop || options.rng != nullptr, "encode: dropout in training needs an rng");
    NodeId current = inputs;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        if (drop) {
            const Tensor& v = graph.value(current);
            current = graph.dropout(current, dropout_mask(v.rows(), v.cols(), 1.0 - options.dropout, *options.rng));
        }
        const NodeId hidden = run_layer(graph, store, k, current);
        const NodeId joined = graph.concat_cols(current, hidden);
        current = graph.relu(graph.matmul_nt(joined, graph.parameter(store, projections_[k])));
    }
    return current;
}

}  // namespace spanrole
