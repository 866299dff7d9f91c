#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spanrole/graph.hpp"
#include "spanrole/parameters.hpp"
#include "spanrole/rng.hpp"

namespace spanrole {

enum class Direction { LeftToRight, RightToLeft };

// One unidirectional LSTM without peepholes. Gate blocks are stacked as
// [input; forget; output; candidate] along the rows of each weight matrix.
struct LstmLayer {
    ParamId input_weights;      // 4d x input_width
    ParamId recurrent_weights;  // 4d x d
    ParamId bias;               // 1 x 4d
    Direction direction = Direction::LeftToRight;
    std::size_t input_width = 0;
    std::size_t hidden = 0;

    static LstmLayer create(ParameterStore& store, const std::string& prefix, std::size_t input_width,
                            std::size_t hidden, Direction direction, Rng& rng);
    static LstmLayer bind(const ParameterStore& store, const std::string& prefix, std::size_t input_width,
                          std::size_t hidden, Direction direction);
};

struct LstmState {
    NodeId h;
    NodeId c;
};

// One recurrence step. A missing `previous` state means h = c = 0.
LstmState lstm_cell(Graph& graph, const ParameterStore& store, const LstmLayer& layer, NodeId x_t,
                    std::optional<LstmState> previous);

struct EncoderOptions {
    bool train = false;
    double dropout = 0.0;  // applied to every LSTM layer's input in training
    Rng* rng = nullptr;    // required when train && dropout > 0
};

// L alternating-direction LSTM layers (odd layers run left to right, even
// layers right to left) joined by x^(l+1) = ReLU(W^(l) [x^(l) ; h^(l)]).
class EncoderStack {
public:
    static EncoderStack create(ParameterStore& store, std::size_t input_width, std::size_t hidden,
                               std::size_t layers, Rng& rng);
    static EncoderStack bind(const ParameterStore& store, std::size_t input_width, std::size_t hidden,
                             std::size_t layers);

    // inputs: T x input_width. Returns h_{1:T} as a T x hidden node.
    NodeId encode(Graph& graph, const ParameterStore& store, NodeId inputs, const EncoderOptions& options) const;
    // Raw hidden states of one layer (0-based) for a T x width input.
    NodeId run_layer(Graph& graph, const ParameterStore& store, std::size_t layer, NodeId inputs) const;

    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t hidden() const noexcept { return hidden_; }
    std::size_t input_width() const noexcept { return input_width_; }
    const LstmLayer& layer(std::size_t k) const { return layers_.at(k); }
    ParamId projection(std::size_t k) const { return projections_.at(k); }

private:
    std::size_t input_width_ = 0;
    std::size_t hidden_ = 0;
    std::vector<LstmLayer> layers_;
    std::vector<ParamId> projections_;  // hidden x (width(x^(l)) + hidden)
};

}  // namespace spanrole
