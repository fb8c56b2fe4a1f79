#include "pinet/autodiff.hpp"

#include <cmath>

#include "pinet/kernels.hpp"

namespace pinet {

const char* op_name(Op op) {
    switch (op) {
        case Op::leaf: return "leaf";
        case Op::constant: return "constant";
        case Op::add: return "add";
        case Op::sub: return "sub";
        case Op::hadamard: return "hadamard";
        case Op::matvec: return "matvec";
        case Op::matvec_t: return "matvec_t";
        case Op::scale: return "scale";
        case Op::tanh: return "tanh";
        case Op::sum: return "sum";
        case Op::instance_norm: return "instance_norm";
        case Op::cross_entropy: return "cross_entropy";
    }
    return "?";
}

const DenseTensor& GradSet::at(std::uint32_t leaf_id) const {
    if (leaf_id >= grads_.size() || !is_leaf_[leaf_id])
        throw std::invalid_argument("GradSet: node " + std::to_string(leaf_id) + " is not a leaf");
    return grads_[leaf_id];
}

bool GradSet::contains(std::uint32_t node_id) const {
    return node_id < grads_.size() && is_leaf_[node_id];
}

DenseTensor Tape::round_if_f32(DenseTensor t) const {
    if (precision_ == Precision::f32)
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(static_cast<float>(t[i]));
    return t;
}

Tape::NodeId Tape::leaf(DenseTensor value) {
    Node n;
    n.op = Op::leaf;
    n.value = round_if_f32(std::move(value));
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::constant(DenseTensor value) {
    Node n;
    n.op = Op::constant;
    n.value = round_if_f32(std::move(value));
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

const DenseTensor& Tape::value(NodeId id) const {
    if (id >= nodes_.size()) throw std::invalid_argument("Tape: node id out of range");
    return nodes_[id].value;
}

namespace {

double logsumexp(const DenseTensor& x) {
    double m = x[0];
    for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, x[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::exp(x[i] - m);
    return m + std::log(acc);
}

}  // namespace

Tape::NodeId Tape::record(Op op, std::span<const NodeId> inputs, double aux, std::size_t label) {
    auto expect_arity = [&](std::size_t n) {
        if (inputs.size() != n)
            throw std::invalid_argument(std::string("record(") + op_name(op) + "): expected " +
                                        std::to_string(n) + " inputs, got " + std::to_string(inputs.size()));
    };
    for (NodeId id : inputs)
        if (id >= nodes_.size())
            throw std::invalid_argument("record: input node id out of range");

    Node n;
    n.op = op;
    n.aux = aux;
    n.label = label;
    n.arity = static_cast<std::uint8_t>(inputs.size());
    if (!inputs.empty()) n.in0 = inputs[0];
    if (inputs.size() > 1) n.in1 = inputs[1];

    switch (op) {
        case Op::leaf:
        case Op::constant:
            throw std::invalid_argument("record: leaves and constants are created directly");
        case Op::add:
            expect_arity(2);
            n.value = pinet::add(nodes_[n.in0].value, nodes_[n.in1].value);
            break;
        case Op::sub:
            expect_arity(2);
            n.value = pinet::sub(nodes_[n.in0].value, nodes_[n.in1].value);
            break;
        case Op::hadamard:
            expect_arity(2);
            n.value = pinet::hadamard(nodes_[n.in0].value, nodes_[n.in1].value);
            break;
        case Op::matvec:
            expect_arity(2);
            n.value = pinet::matvec(nodes_[n.in0].value, nodes_[n.in1].value);
            break;
        case Op::matvec_t:
            expect_arity(2);
            n.value = pinet::matvec_t(nodes_[n.in0].value, nodes_[n.in1].value);
            break;
        case Op::scale:
            expect_arity(1);
            n.value = pinet::scale(nodes_[n.in0].value, aux);
            break;
        case Op::tanh: {
            expect_arity(1);
            DenseTensor v(nodes_[n.in0].value.shape());
            const DenseTensor& x = nodes_[n.in0].value;
            for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::tanh(x[i]);
            n.value = std::move(v);
            break;
        }
        case Op::sum: {
            expect_arity(1);
            const DenseTensor& x = nodes_[n.in0].value;
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) acc += x[i];
            n.value = DenseTensor::scalar(acc);
            break;
        }
        case Op::instance_norm: {
            expect_arity(1);
            const DenseTensor& x = nodes_[n.in0].value;
            if (x.size() == 0) throw shape_error("instance_norm: empty input");
            if (aux <= 0.0) throw std::invalid_argument("instance_norm: epsilon must be positive");
            double mean = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) mean += x[i];
            mean /= static_cast<double>(x.size());
            double var = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) var += (x[i] - mean) * (x[i] - mean);
            var /= static_cast<double>(x.size());
            double inv = 1.0 / std::sqrt(var + aux);
            DenseTensor v(x.shape());
            for (std::size_t i = 0; i < x.size(); ++i) v[i] = (x[i] - mean) * inv;
            n.value = std::move(v);
            break;
        }
        case Op::cross_entropy: {
            expect_arity(1);
            const DenseTensor& x = nodes_[n.in0].value;
            if (x.order() != 1) throw shape_error("cross_entropy: logits must be a vector");
            if (label >= x.size())
                throw std::invalid_argument("cross_entropy: label " + std::to_string(label) +
                                            " out of range for " + std::to_string(x.size()) + " classes");
            if (!x.all_finite()) throw std::invalid_argument("cross_entropy: non-finite logits");
            n.value = DenseTensor::scalar(logsumexp(x) - x[label]);
            break;
        }
    }
    n.value = round_if_f32(std::move(n.value));
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

GradSet Tape::backward(NodeId output) const {
    if (output >= nodes_.size()) throw std::invalid_argument("backward: node id out of range");
    if (nodes_[output].value.size() != 1 || nodes_[output].value.order() > 1)
        throw std::invalid_argument("backward: output must be scalar, got shape " +
                                    nodes_[output].value.shape_str());

    // Reachability sweep so detached leaves are reported rather than
    // silently returned as zero.
    std::vector<std::uint8_t> reached(nodes_.size(), 0);
    reached[output] = 1;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (!reached[i]) continue;
        const Node& n = nodes_[i];
        if (n.arity > 0) reached[n.in0] = 1;
        if (n.arity > 1) reached[n.in1] = 1;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].op == Op::leaf && !reached[i])
            throw std::invalid_argument("backward: leaf node " + std::to_string(i) +
                                        " is detached from the output");

    std::vector<DenseTensor> adj(nodes_.size());
    std::vector<std::uint8_t> has_adj(nodes_.size(), 0);
    auto accum = [&](NodeId id, const DenseTensor& g) {
        if (!has_adj[id]) {
            adj[id] = g;
            has_adj[id] = 1;
        } else {
            kernels::add(adj[id].data(), g.data(), adj[id].data(), g.size());
        }
    };

    adj[output] = DenseTensor(nodes_[output].value.shape());
    adj[output][0] = 1.0;
    has_adj[output] = 1;

    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (!has_adj[i] || !reached[i]) continue;
        const Node& n = nodes_[i];
        const DenseTensor& g = adj[i];
        switch (n.op) {
            case Op::leaf:
            case Op::constant:
                break;
            case Op::add:
                accum(n.in0, g);
                accum(n.in1, g);
                break;
            case Op::sub: {
                accum(n.in0, g);
                accum(n.in1, scale(g, -1.0));
                break;
            }
            case Op::hadamard:
                accum(n.in0, hadamard(g, nodes_[n.in1].value));
                accum(n.in1, hadamard(g, nodes_[n.in0].value));
                break;
            case Op::matvec: {
                // y = M x: dM = g x^T, dx = M^T g.
                const DenseTensor& m = nodes_[n.in0].value;
                const DenseTensor& x = nodes_[n.in1].value;
                DenseTensor dm(m.shape());
                for (std::size_t r = 0; r < m.rows(); ++r)
                    kernels::axpy(g[r], x.data(), dm.data() + r * m.cols(), m.cols());
                accum(n.in0, dm);
                accum(n.in1, matvec_t(m, g));
                break;
            }
            case Op::matvec_t: {
                // y = M^T x: dM = x g^T, dx = M g.
                const DenseTensor& m = nodes_[n.in0].value;
                const DenseTensor& x = nodes_[n.in1].value;
                DenseTensor dm(m.shape());
                for (std::size_t r = 0; r < m.rows(); ++r)
                    kernels::axpy(x[r], g.data(), dm.data() + r * m.cols(), m.cols());
                accum(n.in0, dm);
                accum(n.in1, matvec(m, g));
                break;
            }
            case Op::scale:
                accum(n.in0, scale(g, n.aux));
                break;
            case Op::tanh: {
                // d tanh = 1 - tanh^2, with the cached output as tanh.
                const DenseTensor& v = n.value;
                DenseTensor dx(v.shape());
                for (std::size_t j = 0; j < v.size(); ++j) dx[j] = g[j] * (1.0 - v[j] * v[j]);
                accum(n.in0, dx);
                break;
            }
            case Op::sum: {
                const DenseTensor& x = nodes_[n.in0].value;
                DenseTensor dx(x.shape());
                for (std::size_t j = 0; j < dx.size(); ++j) dx[j] = g[0];
                accum(n.in0, dx);
                break;
            }
            case Op::instance_norm: {
                // With y = (x - mean)/sigma: dx = (g - mean(g) - y*mean(g*y))/sigma.
                const DenseTensor& x = nodes_[n.in0].value;
                const DenseTensor& y = n.value;
                const std::size_t cnt = x.size();
                double mean = 0.0;
                for (std::size_t j = 0; j < cnt; ++j) mean += x[j];
                mean /= static_cast<double>(cnt);
                double var = 0.0;
                for (std::size_t j = 0; j < cnt; ++j) var += (x[j] - mean) * (x[j] - mean);
                var /= static_cast<double>(cnt);
                double inv = 1.0 / std::sqrt(var + n.aux);
                double gm = 0.0, gym = 0.0;
                for (std::size_t j = 0; j < cnt; ++j) {
                    gm += g[j];
                    gym += g[j] * y[j];
                }
                gm /= static_cast<double>(cnt);
                gym /= static_cast<double>(cnt);
                DenseTensor dx(x.shape());
                for (std::size_t j = 0; j < cnt; ++j) dx[j] = (g[j] - gm - y[j] * gym) * inv;
                accum(n.in0, dx);
                break;
            }
            case Op::cross_entropy: {
                // dlogits = softmax(logits) - onehot(label).
                const DenseTensor& x = nodes_[n.in0].value;
                double m = x[0];
                for (std::size_t j = 1; j < x.size(); ++j) m = std::max(m, x[j]);
                double z = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j) z += std::exp(x[j] - m);
                DenseTensor dx(x.shape());
                for (std::size_t j = 0; j < x.size(); ++j) dx[j] = g[0] * (std::exp(x[j] - m) / z);
                dx[n.label] -= g[0];
                accum(n.in0, dx);
                break;
            }
        }
    }

    GradSet out;
    out.grads_.resize(nodes_.size());
    out.is_leaf_.assign(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].op != Op::leaf) continue;
        out.is_leaf_[i] = 1;
        out.grads_[i] = has_adj[i] ? std::move(adj[i]) : DenseTensor(nodes_[i].value.shape());
    }
    return out;
}

GradCheckReport grad_check(const GraphBuilder& build, std::vector<DenseTensor> params,
                           double eps, double tol) {
    if (eps <= 0.0) throw std::invalid_argument("grad_check: eps must be positive");

    auto run = [&](const std::vector<DenseTensor>& p) {
        Tape tape;
        std::vector<Tape::NodeId> ids;
        ids.reserve(p.size());
        for (const DenseTensor& t : p) ids.push_back(tape.leaf(t));
        Tape::NodeId out = build(tape, ids);
        double v = tape.value(out)[0];
        if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite forward value");
        return std::pair<Tape, Tape::NodeId>(std::move(tape), out);
    };

    auto [tape, out] = run(params);
    GradSet grads = tape.backward(out);
    std::vector<Tape::NodeId> leaf_ids;
    for (std::size_t i = 0; i < tape.size(); ++i)
        if (grads.contains(static_cast<Tape::NodeId>(i))) leaf_ids.push_back(static_cast<Tape::NodeId>(i));

    GradCheckReport report;
    report.per_param.assign(params.size(), 0.0);
    for (std::size_t p = 0; p < params.size(); ++p) {
        const DenseTensor& analytic = grads.at(leaf_ids[p]);
        for (std::size_t i = 0; i < params[p].size(); ++i) {
            double saved = params[p][i];
            params[p][i] = saved + eps;
            auto plus = run(params);
            double fp = plus.first.value(plus.second)[0];
            params[p][i] = saved - eps;
            auto minus = run(params);
            double fm = minus.first.value(minus.second)[0];
            params[p][i] = saved;
            double numeric = (fp - fm) / (2.0 * eps);
            double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric)});
            double rel = std::fabs(analytic[i] - numeric) / denom;
            report.per_param[p] = std::max(report.per_param[p], rel);
        }
        report.max_rel_error = std::max(report.max_rel_error, report.per_param[p]);
    }
    report.pass = report.max_rel_error < tol;
    return report;
}

}  // namespace pinet
