#include "spanrole/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spanrole/errors.hpp"

namespace spanrole {
namespace {

double sigmoid_value(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Tensor& grad_slot(std::vector<Tensor>& grads, NodeId id, const Tensor& like) {
    Tensor& slot = grads[id.index];
    if (slot.empty()) {
        slot = Tensor(like.rows(), like.cols());
    }
    return slot;
}

}  // namespace

NodeId Graph::push(Node node) {
    nodes_.push_back(std::move(node));
    return NodeId{nodes_.size() - 1};
}

const Graph::Node& Graph::node(NodeId id) const {
    require(id.index < nodes_.size(), "node id does not belong to this graph");
    return nodes_[id.index];
}

const Tensor& Graph::value(NodeId id) const { return node(id).value(); }

bool Graph::grad_flows(std::span<const NodeId> inputs) const {
    return std::any_of(inputs.begin(), inputs.end(),
                       [&](NodeId id) { return node(id).requires_grad; });
}

NodeId Graph::constant(Tensor value) {
    Node n;
    n.op = Op::Constant;
    n.owned = std::move(value);
    return push(std::move(n));
}

NodeId Graph::variable(Tensor value) {
    Node n;
    n.op = Op::Variable;
    n.owned = std::move(value);
    n.requires_grad = true;
    return push(std::move(n));
}

NodeId Graph::parameter(const ParameterStore& store, ParamId id) {
    if (auto it = param_nodes_.find(id); it != param_nodes_.end()) {
        return it->second;
    }
    Node n;
    n.op = Op::Parameter;
    n.borrowed = &store.value(id);
    n.param = id;
    n.requires_grad = true;
    const NodeId out = push(std::move(n));
    param_nodes_.emplace(id, out);
    return out;
}

NodeId Graph::add(NodeId a, NodeId b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require(x.same_shape(y), "add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.inputs = {a, b};
    n.owned = x + y;
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::add_row(NodeId a, NodeId row) {
    const Tensor& x = value(a);
    const Tensor& r = value(row);
    require(r.rows() == 1 && r.cols() == x.cols(), "add_row: row width mismatch");
    Node n;
    n.op = Op::AddRow;
    n.inputs = {a, row};
    n.owned = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto dst = n.owned.row(i);
        for (std::size_t c = 0; c < x.cols(); ++c) {
            dst[c] += r[c];
        }
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::sub(NodeId a, NodeId b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require(x.same_shape(y), "sub: shape mismatch");
    Node n;
    n.op = Op::Sub;
    n.inputs = {a, b};
    n.owned = x - y;
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require(x.same_shape(y), "mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.inputs = {a, b};
    n.owned = hadamard(x, y);
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double factor) {
    Node n;
    n.op = Op::Scale;
    n.inputs = {a};
    n.owned = value(a) * factor;
    n.factor = factor;
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
    Node n;
    n.op = Op::MatMul;
    n.inputs = {a, b};
    n.owned = spanrole::matmul(value(a), value(b));
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::matmul_nt(NodeId a, NodeId b) {
    Node n;
    n.op = Op::MatMulNT;
    n.inputs = {a, b};
    n.owned = spanrole::matmul_nt(value(a), value(b));
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::concat_cols(NodeId a, NodeId b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    require(x.rows() == y.rows(), "concat_cols: row counts differ");
    Node n;
    n.op = Op::ConcatCols;
    n.inputs = {a, b};
    n.owned = Tensor(x.rows(), x.cols() + y.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto dst = n.owned.row(r);
        std::copy(x.row(r).begin(), x.row(r).end(), dst.begin());
        std::copy(y.row(r).begin(), y.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(x.cols()));
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::stack_rows(std::span<const NodeId> parts) {
    require(!parts.empty(), "stack_rows: no inputs");
    const std::size_t width = value(parts.front()).cols();
    std::size_t total = 0;
    for (NodeId id : parts) {
        require(value(id).cols() == width, "stack_rows: widths differ");
        total += value(id).rows();
    }
    Node n;
    n.op = Op::StackRows;
    n.inputs.assign(parts.begin(), parts.end());
    n.owned = Tensor(total, width);
    std::size_t r = 0;
    for (NodeId id : parts) {
        const Tensor& part = value(id);
        std::copy(part.values().begin(), part.values().end(), n.owned.row(r).begin());
        r += part.rows();
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::slice_rows(NodeId a, std::size_t begin, std::size_t count) {
    const Tensor& x = value(a);
    require(count > 0 && begin + count <= x.rows(), "slice_rows: range out of bounds");
    Node n;
    n.op = Op::SliceRows;
    n.inputs = {a};
    n.offset = begin;
    n.owned = Tensor(count, x.cols());
    std::copy(x.row(begin).begin(), x.row(begin).begin() + static_cast<std::ptrdiff_t>(count * x.cols()),
              n.owned.values().begin());
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::slice_cols(NodeId a, std::size_t begin, std::size_t count) {
    const Tensor& x = value(a);
    require(count > 0 && begin + count <= x.cols(), "slice_cols: range out of bounds");
    Node n;
    n.op = Op::SliceCols;
    n.inputs = {a};
    n.offset = begin;
    n.owned = Tensor(x.rows(), count);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < count; ++c) {
            n.owned(r, c) = x(r, begin + c);
        }
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId a) {
    Node n;
    n.op = Op::Sigmoid;
    n.inputs = {a};
    n.owned = value(a);
    for (double& v : n.owned.values()) {
        v = sigmoid_value(v);
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::tanh(NodeId a) {
    Node n;
    n.op = Op::Tanh;
    n.inputs = {a};
    n.owned = value(a);
    for (double& v : n.owned.values()) {
        v = std::tanh(v);
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::relu(NodeId a) {
    Node n;
    n.op = Op::Relu;
    n.inputs = {a};
    n.owned = value(a);
    for (double& v : n.owned.values()) {
        v = v > 0.0 ? v : 0.0;
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::dropout(NodeId a, Tensor mask) {
    require(value(a).same_shape(mask), "dropout: mask shape mismatch");
    Node n;
    n.op = Op::Dropout;
    n.inputs = {a};
    n.owned = hadamard(value(a), mask);
    n.aux = std::move(mask);
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::gather_rows(NodeId table, std::vector<std::size_t> rows) {
    const Tensor& t = value(table);
    require(!rows.empty(), "gather_rows: no rows requested");
    Node n;
    n.op = Op::GatherRows;
    n.inputs = {table};
    n.owned = Tensor(rows.size(), t.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k] < t.rows(), "gather_rows: row index out of range");
        std::copy(t.row(rows[k]).begin(), t.row(rows[k]).end(), n.owned.row(k).begin());
    }
    n.indices = std::move(rows);
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::span_features(NodeId h, std::vector<std::pair<std::size_t, std::size_t>> spans) {
    const Tensor& x = value(h);
    require(!spans.empty(), "span_features: no spans");
    const std::size_t d = x.cols();
    Node n;
    n.op = Op::SpanFeatures;
    n.inputs = {h};
    n.owned = Tensor(spans.size(), 2 * d);
    n.indices.reserve(2 * spans.size());
    for (std::size_t s = 0; s < spans.size(); ++s) {
        const auto [i, j] = spans[s];
        require(i <= j && j < x.rows(), "span_features: span out of range");
        auto dst = n.owned.row(s);
        const auto hi = x.row(i);
        const auto hj = x.row(j);
        for (std::size_t c = 0; c < d; ++c) {
            dst[c] = hi[c] + hj[c];
            dst[d + c] = hi[c] - hj[c];
        }
        n.indices.push_back(i);
        n.indices.push_back(j);
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::log_sum_exp(NodeId a) {
    const Tensor& x = value(a);
    const double peak = *std::max_element(x.values().begin(), x.values().end());
    double total = 0.0;
    for (double v : x.values()) {
        total += std::exp(v - peak);
    }
    Node n;
    n.op = Op::LogSumExp;
    n.inputs = {a};
    n.owned = Tensor::scalar(peak + std::log(total));
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::log_sum_exp_cols(NodeId a) {
    const Tensor& x = value(a);
    Node n;
    n.op = Op::LogSumExpCols;
    n.inputs = {a};
    n.owned = Tensor(1, x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < x.rows(); ++r) {
            peak = std::max(peak, x(r, c));
        }
        double total = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            total += std::exp(x(r, c) - peak);
        }
        n.owned(0, c) = peak + std::log(total);
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::pick(NodeId a, std::vector<std::pair<std::size_t, std::size_t>> cells) {
    const Tensor& x = value(a);
    require(!cells.empty(), "pick: no cells");
    Node n;
    n.op = Op::Pick;
    n.inputs = {a};
    n.owned = Tensor(cells.size(), 1);
    n.indices.reserve(2 * cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto [r, c] = cells[k];
        require(r < x.rows() && c < x.cols(), "pick: cell out of range");
        n.owned(k, 0) = x(r, c);
        n.indices.push_back(r);
        n.indices.push_back(c);
    }
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::sum(NodeId a) {
    double total = 0.0;
    for (double v : value(a).values()) {
        total += v;
    }
    Node n;
    n.op = Op::Sum;
    n.inputs = {a};
    n.owned = Tensor::scalar(total);
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::squared_norm(NodeId a) {
    Node n;
    n.op = Op::SquaredNorm;
    n.inputs = {a};
    n.owned = Tensor::scalar(value(a).squared_norm());
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::softmax(NodeId a) {
    const Tensor& x = value(a);
    require(x.rows() == 1, "softmax: expects a row vector");
    const double peak = *std::max_element(x.values().begin(), x.values().end());
    Node n;
    n.op = Op::Softmax;
    n.inputs = {a};
    n.owned = x;
    double total = 0.0;
    for (double& v : n.owned.values()) {
        v = std::exp(v - peak);
        total += v;
    }
    n.owned *= 1.0 / total;
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::scale_by_entry(NodeId a, NodeId weights, std::size_t k) {
    const Tensor& w = value(weights);
    require(w.rows() == 1 && k < w.cols(), "scale_by_entry: index out of range");
    Node n;
    n.op = Op::ScaleByEntry;
    n.inputs = {a, weights};
    n.offset = k;
    n.owned = value(a) * w(0, k);
    n.requires_grad = grad_flows(n.inputs);
    return push(std::move(n));
}

NodeId Graph::apply(Op op, std::span<const NodeId> inputs) {
    auto arity = [&](std::size_t expected) {
        require(inputs.size() == expected, "apply: wrong number of inputs");
    };
    switch (op) {
        case Op::Add: arity(2); return add(inputs[0], inputs[1]);
        case Op::AddRow: arity(2); return add_row(inputs[0], inputs[1]);
        case Op::Sub: arity(2); return sub(inputs[0], inputs[1]);
        case Op::Mul: arity(2); return mul(inputs[0], inputs[1]);
        case Op::MatMul: arity(2); return matmul(inputs[0], inputs[1]);
        case Op::MatMulNT: arity(2); return matmul_nt(inputs[0], inputs[1]);
        case Op::ConcatCols: arity(2); return concat_cols(inputs[0], inputs[1]);
        case Op::StackRows: return stack_rows(inputs);
        case Op::Sigmoid: arity(1); return sigmoid(inputs[0]);
        case Op::Tanh: arity(1); return tanh(inputs[0]);
        case Op::Relu: arity(1); return relu(inputs[0]);
        case Op::LogSumExp: arity(1); return log_sum_exp(inputs[0]);
        case Op::LogSumExpCols: arity(1); return log_sum_exp_cols(inputs[0]);
        case Op::Sum: arity(1); return sum(inputs[0]);
        case Op::SquaredNorm: arity(1); return squared_norm(inputs[0]);
        case Op::Softmax: arity(1); return softmax(inputs[0]);
        default: break;
    }
    throw ContractViolation("apply: operation is not supported by the generic builder");
}

GradientMap Graph::backward(NodeId loss) {
    const Tensor& out = value(loss);
    require(out.rows() == 1 && out.cols() == 1, "backward: loss must be a scalar");
    std::vector<Tensor> grads(nodes_.size());
    grads[loss.index] = Tensor::scalar(1.0);
    for (std::size_t k = loss.index + 1; k-- > 0;) {
        if (grads[k].empty() || !nodes_[k].requires_grad) {
            continue;
        }
        propagate(k, grads);
    }
    GradientMap result;
    for (const auto& [param, id] : param_nodes_) {
        if (!grads[id.index].empty()) {
            result.emplace(param, grads[id.index]);
        }
    }
    last_grads_ = std::move(grads);
    return result;
}

Tensor Graph::gradient(NodeId id) const {
    const Tensor& v = value(id);
    if (id.index < last_grads_.size() && !last_grads_[id.index].empty()) {
        return last_grads_[id.index];
    }
    return Tensor(v.rows(), v.cols());
}

void Graph::propagate(std::size_t index, std::vector<Tensor>& grads) const {
    const Node& n = nodes_[index];
    const Tensor& g = grads[index];
    const Tensor& y = n.value();
    auto wants = [&](std::size_t input) { return nodes_[n.inputs[input].index].requires_grad; };
    auto slot = [&](std::size_t input) -> Tensor& {
        const NodeId id = n.inputs[input];
        return grad_slot(grads, id, nodes_[id.index].value());
    };

    switch (n.op) {
        case Op::Constant:
        case Op::Variable:
        case Op::Parameter:
            return;
        case Op::Add:
            if (wants(0)) slot(0) += g;
            if (wants(1)) slot(1) += g;
            return;
        case Op::AddRow:
            if (wants(0)) slot(0) += g;
            if (wants(1)) {
                Tensor& gb = slot(1);
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        gb[c] += g(r, c);
                    }
                }
            }
            return;
        case Op::Sub:
            if (wants(0)) slot(0) += g;
            if (wants(1)) slot(1) -= g;
            return;
        case Op::Mul: {
            const Tensor& a = nodes_[n.inputs[0].index].value();
            const Tensor& b = nodes_[n.inputs[1].index].value();
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * b[k];
            }
            if (wants(1)) {
                Tensor& gb = slot(1);
                for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * a[k];
            }
            return;
        }
        case Op::Scale:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += n.factor * g[k];
            }
            return;
        case Op::MatMul: {
            const Tensor& a = nodes_[n.inputs[0].index].value();
            const Tensor& b = nodes_[n.inputs[1].index].value();
            if (wants(0)) slot(0) += spanrole::matmul_nt(g, b);
            if (wants(1)) slot(1) += spanrole::matmul_tn(a, g);
            return;
        }
        case Op::MatMulNT: {
            const Tensor& a = nodes_[n.inputs[0].index].value();
            const Tensor& b = nodes_[n.inputs[1].index].value();
            if (wants(0)) slot(0) += spanrole::matmul(g, b);
            if (wants(1)) slot(1) += spanrole::matmul_tn(g, a);
            return;
        }
        case Op::ConcatCols: {
            const std::size_t left = nodes_[n.inputs[0].index].value().cols();
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < left; ++c) ga(r, c) += g(r, c);
            }
            if (wants(1)) {
                Tensor& gb = slot(1);
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = left; c < g.cols(); ++c) gb(r, c - left) += g(r, c);
            }
            return;
        }
        case Op::StackRows: {
            std::size_t row = 0;
            for (std::size_t k = 0; k < n.inputs.size(); ++k) {
                const std::size_t count = nodes_[n.inputs[k].index].value().rows();
                if (wants(k)) {
                    Tensor& gk = slot(k);
                    const double* src = g.row(row).data();
                    for (std::size_t e = 0; e < gk.size(); ++e) gk[e] += src[e];
                }
                row += count;
            }
            return;
        }
        case Op::SliceRows:
            if (wants(0)) {
                Tensor& ga = slot(0);
                double* dst = &ga(n.offset, 0);
                for (std::size_t e = 0; e < g.size(); ++e) dst[e] += g[e];
            }
            return;
        case Op::SliceCols:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) ga(r, n.offset + c) += g(r, c);
            }
            return;
        case Op::Sigmoid:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * y[k] * (1.0 - y[k]);
            }
            return;
        case Op::Tanh:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - y[k] * y[k]);
            }
            return;
        case Op::Relu:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += y[k] > 0.0 ? g[k] : 0.0;
            }
            return;
        case Op::Dropout:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.aux[k];
            }
            return;
        case Op::GatherRows:
            if (wants(0)) {
                Tensor& gt = slot(0);
                for (std::size_t k = 0; k < n.indices.size(); ++k) {
                    auto dst = gt.row(n.indices[k]);
                    const auto src = g.row(k);
                    for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
                }
            }
            return;
        case Op::SpanFeatures:
            if (wants(0)) {
                Tensor& gh = slot(0);
                const std::size_t d = gh.cols();
                for (std::size_t s = 0; s < g.rows(); ++s) {
                    const auto src = g.row(s);
                    auto gi = gh.row(n.indices[2 * s]);
                    for (std::size_t c = 0; c < d; ++c) gi[c] += src[c] + src[d + c];
                    auto gj = gh.row(n.indices[2 * s + 1]);
                    for (std::size_t c = 0; c < d; ++c) gj[c] += src[c] - src[d + c];
                }
            }
            return;
        case Op::LogSumExp:
            if (wants(0)) {
                const Tensor& x = nodes_[n.inputs[0].index].value();
                Tensor& ga = slot(0);
                const double scale = g[0];
                for (std::size_t k = 0; k < x.size(); ++k) ga[k] += scale * std::exp(x[k] - y[0]);
            }
            return;
        case Op::LogSumExpCols:
            if (wants(0)) {
                const Tensor& x = nodes_[n.inputs[0].index].value();
                Tensor& ga = slot(0);
                for (std::size_t r = 0; r < x.rows(); ++r)
                    for (std::size_t c = 0; c < x.cols(); ++c)
                        ga(r, c) += g[c] * std::exp(x(r, c) - y[c]);
            }
            return;
        case Op::Pick:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < g.rows(); ++k)
                    ga(n.indices[2 * k], n.indices[2 * k + 1]) += g[k];
            }
            return;
        case Op::Sum:
            if (wants(0)) {
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[0];
            }
            return;
        case Op::SquaredNorm:
            if (wants(0)) {
                const Tensor& x = nodes_[n.inputs[0].index].value();
                Tensor& ga = slot(0);
                for (std::size_t k = 0; k < x.size(); ++k) ga[k] += 2.0 * g[0] * x[k];
            }
            return;
        case Op::Softmax:
            if (wants(0)) {
                Tensor& ga = slot(0);
                const double inner = dot(g.values(), y.values());
                for (std::size_t k = 0; k < y.size(); ++k) ga[k] += y[k] * (g[k] - inner);
            }
            return;
        case Op::ScaleByEntry: {
            const Tensor& x = nodes_[n.inputs[0].index].value();
            const Tensor& w = nodes_[n.inputs[1].index].value();
            if (wants(0)) {
                Tensor& ga = slot(0);
                const double weight = w(0, n.offset);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += weight * g[k];
            }
            if (wants(1)) {
                Tensor& gw = slot(1);
                gw(0, n.offset) += dot(g.values(), x.values());
            }
            return;
        }
    }
    throw ContractViolation("backward: unknown operation in graph");
}

}  // namespace spanrole
