#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pinet/tensor.hpp"

namespace pinet {

/// Tape primitives. The polynomial models and their losses need nothing
/// beyond these; matvec/matvec_t differentiate with respect to both the
/// matrix and the vector operand.
enum class Op : std::uint8_t {
    leaf,           // trainable parameter
    constant,       // input data, not differentiated
    add,
    sub,
    hadamard,
    matvec,         // y = M x
    matvec_t,       // y = M^T x
    scale,          // y = s * x, s a fixed scalar
    tanh,
    sum,            // scalar sum of all entries
    instance_norm,  // y = (x - mean) / sqrt(var + eps), per call
    cross_entropy,  // scalar logsumexp(x) - x[label]
};

const char* op_name(Op op);

/// Gradients keyed by leaf node id; every entry has the shape of its
/// parameter. Immutable once returned from backward.
class GradSet {
public:
    const DenseTensor& at(std::uint32_t leaf_id) const;
    bool contains(std::uint32_t node_id) const;

private:
    friend class Tape;
    std::vector<DenseTensor> grads_;
    std::vector<std::uint8_t> is_leaf_;
};

/// Append-only record of a forward computation. Nodes store their cached
/// forward values; inputs always precede consumers, so one reverse sweep
/// yields exact gradients. A tape is single-owner while recording; run
/// independent tapes for concurrent work.
class Tape {
public:
    using NodeId = std::uint32_t;

    /// Number of recording precisions: f64 runs everything in doubles; f32
    /// rounds every stored forward value through IEEE binary32 (gradient
    /// accumulation stays in doubles either way).
    enum class Precision { f64, f32 };

    explicit Tape(Precision p = Precision::f64) : precision_(p) {}

    NodeId leaf(DenseTensor value);
    NodeId constant(DenseTensor value);

    /// Generic primitive application: validates shapes, computes and caches
    /// the forward value. aux carries the scale factor, normalization
    /// epsilon, or class label where the primitive needs one.
    NodeId record(Op op, std::span<const NodeId> inputs, double aux = 0.0, std::size_t label = 0);

    NodeId add(NodeId a, NodeId b) { return record(Op::add, {{a, b}}); }
    NodeId sub(NodeId a, NodeId b) { return record(Op::sub, {{a, b}}); }
    NodeId hadamard(NodeId a, NodeId b) { return record(Op::hadamard, {{a, b}}); }
    NodeId matvec(NodeId m, NodeId x) { return record(Op::matvec, {{m, x}}); }
    NodeId matvec_t(NodeId m, NodeId x) { return record(Op::matvec_t, {{m, x}}); }
    NodeId scale(NodeId x, double s) { return record(Op::scale, {{x}}, s); }
    NodeId tanh(NodeId x) { return record(Op::tanh, {{x}}); }
    NodeId sum(NodeId x) { return record(Op::sum, {{x}}); }
    NodeId instance_norm(NodeId x, double eps) { return record(Op::instance_norm, {{x}}, eps); }
    NodeId cross_entropy(NodeId logits, std::size_t label) {
        return record(Op::cross_entropy, {{logits}}, 0.0, label);
    }

    const DenseTensor& value(NodeId id) const;
    std::size_t size() const { return nodes_.size(); }
    Precision precision() const { return precision_; }

    /// Reverse sweep from a scalar output. Rejects non-scalar outputs and
    /// leaves that the output does not depend on.
    GradSet backward(NodeId output) const;

private:
    struct Node {
        Op op;
        NodeId in0 = 0, in1 = 0;
        std::uint8_t arity = 0;
        double aux = 0.0;
        std::size_t label = 0;
        DenseTensor value;
    };

    DenseTensor round_if_f32(DenseTensor t) const;

    Precision precision_;
    std::vector<Node> nodes_;
};

/// Outcome of a finite-difference gradient validation.
struct GradCheckReport {
    double max_rel_error = 0.0;
    bool pass = false;
    /// Per-parameter worst relative error, in leaf order.
    std::vector<double> per_param;
};

/// Builds a scalar graph over the given parameter leaves. The callable
/// receives a fresh tape plus the leaf node ids, one per parameter, and
/// returns the scalar output node.
using GraphBuilder = std::function<Tape::NodeId(Tape&, std::span<const Tape::NodeId>)>;

/// Compares analytic gradients against central differences
/// (f(p+eps e_i) - f(p-eps e_i)) / (2 eps), coordinate by coordinate.
/// Relative error uses max(1, |analytic|, |numeric|) as the denominator.
/// Throws on non-finite forward values.
GradCheckReport grad_check(const GraphBuilder& build, std::vector<DenseTensor> params,
                           double eps, double tol);

}  // namespace pinet
