#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pinet/rng.hpp"
#include "pinet/tensor.hpp"

namespace pinet {

/// Optional stabilization of the multiplicative (order-raising) terms.
/// none          : exact polynomial recursions; required by the oracle paths.
/// tanh_higher   : every order-n multiplicative term with n >= 2 passes
///                 through tanh before entering the state update.
/// standardize2  : the order-2 term alone is standardized per sample to
///                 zero mean / unit variance (epsilon-stabilized).
struct NormalizationSpec {
    enum class Mode { none, tanh_higher, standardize2 };
    Mode mode = Mode::none;
    double epsilon = 1e-5;

    bool is_none() const { return mode == Mode::none; }
};

/// Coupled CP decomposition model,
///     x_1 = U1^T z,  x_n = (Un^T z) * x_{n-1} + x_{n-1},  out = C x_N + beta.
struct CCPParams {
    std::vector<DenseTensor> U;  // N factor matrices, each d x k
    DenseTensor C;               // o x k
    DenseTensor beta;            // o

    std::size_t order() const { return U.size(); }
    std::size_t input_dim() const { return U.at(0).rows(); }
    std::size_t rank() const { return U.at(0).cols(); }
    std::size_t output_dim() const { return beta.size(); }
    void validate() const;
};

/// Nested coupled CP decomposition model,
///     x_1 = (A1^T z) * (B1^T b1),
///     x_n = (An^T z) * (Sn^T x_{n-1} + Bn^T bn),  out = C x_N + beta.
/// S is indexed n = 2..N; the first step has no recursion input.
struct NCPParams {
    std::vector<DenseTensor> A;  // N matrices, d x k
    std::vector<DenseTensor> S;  // N-1 matrices (n = 2..N), k x k
    std::vector<DenseTensor> B;  // N matrices, omega x k
    std::vector<DenseTensor> b;  // N vectors, omega
    DenseTensor C;               // o x k
    DenseTensor beta;            // o

    std::size_t order() const { return A.size(); }
    std::size_t input_dim() const { return A.at(0).rows(); }
    std::size_t rank() const { return A.at(0).cols(); }
    std::size_t aux_dim() const { return b.at(0).size(); }
    std::size_t output_dim() const { return beta.size(); }
    void validate() const;
};

/// NCP with a learned linear skip: x_n gains the term Vn x_{n-1} (n = 2..N).
struct NCPSkipParams {
    NCPParams core;
    std::vector<DenseTensor> V;  // N-1 matrices (n = 2..N), k x k

    std::size_t order() const { return core.order(); }
    void validate() const;
};

/// Single-operator polynomial,
///     y = sum_{n=2..N} (S^T y1)^{*n} + S^T y1 + beta,
/// with (.)^{*n} the n-fold Hadamard power.
struct SimpleSingleOpParams {
    std::size_t N = 1;
    DenseTensor S;     // d x o
    DenseTensor beta;  // o

    std::size_t order() const { return N; }
    std::size_t input_dim() const { return S.rows(); }
    std::size_t output_dim() const { return beta.size(); }
    void validate() const;
};

enum class Variant { ccp, ncp, ncp_skip, simple };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// One polynomial block in a chain: a parameter set plus its normalization.
struct PolyBlock {
    std::variant<CCPParams, NCPParams, NCPSkipParams, SimpleSingleOpParams> params;
    NormalizationSpec norm;

    Variant variant() const;
    std::size_t order() const;
    std::size_t input_dim() const;
    std::size_t output_dim() const;
    void validate() const;
};

/// Product of polynomials: blocks applied in sequence, so the composite
/// degree is at most the product of the block orders. When inner_bias is
/// false only the final block's beta is a free (trainable) parameter;
/// inner betas stay fixed at zero.
struct PolyChain {
    std::vector<PolyBlock> blocks;
    bool inner_bias = false;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Forward evaluation.
// ---------------------------------------------------------------------------

DenseTensor ccp_forward(const CCPParams& p, const DenseTensor& z,
                        const NormalizationSpec& norm = {});
DenseTensor ncp_forward(const NCPParams& p, const DenseTensor& z,
                        const NormalizationSpec& norm = {});
DenseTensor ncp_skip_forward(const NCPSkipParams& p, const DenseTensor& z,
                             const NormalizationSpec& norm = {});
DenseTensor simple_single_op_forward(const SimpleSingleOpParams& p, const DenseTensor& y1,
                                     const NormalizationSpec& norm = {});

DenseTensor block_forward(const PolyBlock& block, const DenseTensor& z);
DenseTensor chain_forward(const PolyChain& chain, const DenseTensor& z);

/// Residual-block reading of NCP-Skip: overwrites every Vn with I + Sn, so
/// each step satisfies x_n = x_{n-1} + S x_{n-1} + (A^T z) * (S^T x_{n-1} + B^T b).
NCPSkipParams polynomialize_residual(const NCPSkipParams& p);

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

/// Untrained description of one block. omega defaults to k when 0.
struct BlockSpec {
    Variant variant = Variant::ccp;
    std::size_t N = 1;
    std::size_t d = 1;
    std::size_t k = 1;
    std::size_t o = 1;
    std::size_t omega = 0;
    NormalizationSpec norm;

    std::size_t effective_omega() const { return omega == 0 ? k : omega; }
    void validate() const;
};

struct ChainSpec {
    std::vector<BlockSpec> blocks;
    bool inner_bias = false;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Training initialization: factor entries are zero-mean normal with
/// standard deviation c^n / sqrt(k) (c = 0.5, n the factor's order index;
/// order-free matrices use n = 0) so per-order term magnitudes stay
/// balanced at unit-norm inputs. Scaling vectors b start at all-ones and
/// biases beta at zero. Identical seeds give bit-identical parameters.
PolyBlock init_params(const BlockSpec& spec, SplitMix64& rng);
PolyChain init_chain(const ChainSpec& spec);

/// Undamped draw with every matrix entry N(0, 1/k) and b entries N(0, 1):
/// the "generic parameters" used by equivalence and degree verification,
/// where top-order coefficients must not be vanishingly small.
PolyBlock generic_params(const BlockSpec& spec, SplitMix64& rng);

/// Exact count of learnable scalars.
std::size_t count_params(const BlockSpec& spec);
std::size_t count_params(const ChainSpec& spec);

/// Recovers the structural description of a built block.
BlockSpec spec_of(const PolyBlock& block);

// ---------------------------------------------------------------------------
// Parameter enumeration (shared by training, checkpoints, inspection).
// ---------------------------------------------------------------------------

/// Named view of one tensor in a chain. Enumeration order is fixed:
/// blocks in sequence, and within a block U1..UN / A1..AN, S2..SN, B1..BN,
/// b1..bN, V2..VN, C, beta (roles absent from a variant are skipped).
/// Chain-level names carry a "b<i>." block prefix.
struct ParamRef {
    std::string name;
    DenseTensor* tensor;
    std::size_t block;
    bool trainable;
};

std::vector<ParamRef> block_param_refs(PolyBlock& block);
std::vector<ParamRef> chain_param_refs(PolyChain& chain);

}  // namespace pinet
