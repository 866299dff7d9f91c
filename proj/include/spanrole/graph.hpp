#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "spanrole/parameters.hpp"
#include "spanrole/tensor.hpp"

namespace spanrole {

struct NodeId {
    std::size_t index = 0;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class Op : std::uint8_t {
    Constant,
    Variable,
    Parameter,
    Add,
    AddRow,
    Sub,
    Mul,
    Scale,
    MatMul,
    MatMulNT,
    ConcatCols,
    StackRows,
    SliceRows,
    SliceCols,
    Sigmoid,
    Tanh,
    Relu,
    Dropout,
    GatherRows,
    SpanFeatures,
    LogSumExp,
    LogSumExpCols,
    Pick,
    Sum,
    SquaredNorm,
    Softmax,
    ScaleByEntry,
};

using GradientMap = std::map<ParamId, Tensor>;

// Define-by-run reverse-mode differentiation tape. Nodes are appended in
// evaluation order, so insertion order is a topological order and backward
// walks it in reverse exactly once.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    Graph(Graph&&) = default;
    Graph& operator=(Graph&&) = default;

    // Leaf that never receives a gradient.
    NodeId constant(Tensor value);
    // Leaf whose gradient is available through gradient() after backward,
    // but which is not reported in the GradientMap.
    NodeId variable(Tensor value);
    // Leaf bound to a stored parameter. Repeated calls for the same id
    // return the same node. The store must outlive the graph and must not
    // be modified while the graph is alive.
    NodeId parameter(const ParameterStore& store, ParamId id);

    NodeId add(NodeId a, NodeId b);
    // a (n x m) plus a 1 x m row broadcast over every row.
    NodeId add_row(NodeId a, NodeId row);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double factor);
    NodeId matmul(NodeId a, NodeId b);
    // a * b^T
    NodeId matmul_nt(NodeId a, NodeId b);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId stack_rows(std::span<const NodeId> parts);
    NodeId slice_rows(NodeId a, std::size_t begin, std::size_t count);
    NodeId slice_cols(NodeId a, std::size_t begin, std::size_t count);
    NodeId sigmoid(NodeId a);
    NodeId tanh(NodeId a);
    NodeId relu(NodeId a);
    // Elementwise product with a fixed mask (already scaled for inverted dropout).
    NodeId dropout(NodeId a, Tensor mask);
    NodeId gather_rows(NodeId table, std::vector<std::size_t> rows);
    // Row s of the result is [h_i + h_j ; h_i - h_j] for the s-th (i, j)
    // pair, 0-based row indices into h.
    NodeId span_features(NodeId h, std::vector<std::pair<std::size_t, std::size_t>> spans);
    // log sum exp over every element, a scalar.
    NodeId log_sum_exp(NodeId a);
    // log sum exp down each column: n x m -> 1 x m.
    NodeId log_sum_exp_cols(NodeId a);
    // Selected (row, col) elements as an n x 1 column.
    NodeId pick(NodeId a, std::vector<std::pair<std::size_t, std::size_t>> cells);
    NodeId sum(NodeId a);
    NodeId squared_norm(NodeId a);
    // Softmax of a 1 x m row.
    NodeId softmax(NodeId a);
    // weights[0, k] * a
    NodeId scale_by_entry(NodeId a, NodeId weights, std::size_t k);

    // Generic builder for operations that take no attributes. Anything else
    // (leaves, attribute-carrying ops, unknown codes) is rejected.
    NodeId apply(Op op, std::span<const NodeId> inputs);

    const Tensor& value(NodeId id) const;
    Op op(NodeId id) const { return nodes_.at(id.index).op; }
    std::size_t size() const noexcept { return nodes_.size(); }

    // Reverse pass from a 1 x 1 node. Returns d loss / d parameter for every
    // parameter node that the loss depends on.
    GradientMap backward(NodeId loss);
    // Gradient of the last backward() loss with respect to a node. Zero for
    // nodes the loss does not depend on.
    Tensor gradient(NodeId id) const;

private:
    struct Node {
        Op op = Op::Constant;
        std::vector<NodeId> inputs;
        Tensor owned;
        const Tensor* borrowed = nullptr;
        ParamId param{};
        bool requires_grad = false;
        Tensor aux;
        std::vector<std::size_t> indices;
        double factor = 0.0;
        std::size_t offset = 0;

        const Tensor& value() const { return borrowed != nullptr ? *borrowed : owned; }
    };

    NodeId push(Node node);
    const Node& node(NodeId id) const;
    bool grad_flows(std::span<const NodeId> inputs) const;
    void propagate(std::size_t index, std::vector<Tensor>& grads) const;

    std::vector<Node> nodes_;
    std::map<ParamId, NodeId> param_nodes_;
    std::vector<Tensor> last_grads_;
};

}  // namespace spanrole
