#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pinet/errors.hpp"

namespace pinet {

/// Dense real tensor of arbitrary order. Values are 64-bit floats stored
/// flat in row-major order (last index fastest). Order 0 is permitted only
/// as a scalar wrapper: empty shape, one data element.
class DenseTensor {
public:
    /// Order-0 scalar holding 0.0.
    DenseTensor() : data_(1, 0.0) {}

    /// Zero-filled tensor of the given shape. Extents must be positive.
    explicit DenseTensor(std::vector<std::size_t> shape);

    /// Tensor with explicit contents; data length must equal product(shape).
    DenseTensor(std::vector<std::size_t> shape, std::vector<double> data);

    static DenseTensor scalar(double v);
    static DenseTensor vector(std::vector<double> v);
    static DenseTensor matrix(std::size_t rows, std::size_t cols);
    static DenseTensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t order() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    /// Extent of the given mode, 1-based as in the tensor literature.
    std::size_t extent(std::size_t mode) const;

    // Order-2 / order-1 conveniences.
    std::size_t rows() const;
    std::size_t cols() const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    /// Multi-index access, 0-based indices, one per mode.
    double& at(std::span<const std::size_t> idx);
    double at(std::span<const std::size_t> idx) const;
    double& at(std::initializer_list<std::size_t> idx);
    double at(std::initializer_list<std::size_t> idx) const;

    bool same_shape(const DenseTensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    /// Max absolute entry.
    double max_abs() const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_to_string(std::span<const std::size_t> shape);

/// Row-major flat index of a multi-index.
std::size_t flat_index(std::span<const std::size_t> shape, std::span<const std::size_t> idx);

// ---------------------------------------------------------------------------
// Multilinear kernels.
// ---------------------------------------------------------------------------

/// Elementwise product. Defined for any pair of equal-shape tensors.
DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);

/// Elementwise sum / difference / scaling (shared plumbing for the layers
/// above; same shape rules as hadamard).
DenseTensor add(const DenseTensor& a, const DenseTensor& b);
DenseTensor sub(const DenseTensor& a, const DenseTensor& b);
DenseTensor scale(const DenseTensor& a, double s);

/// Khatri-Rao (column-wise Kronecker) product of an IxN and a JxN matrix;
/// the result is (I*J)xN with the second operand's row index fastest, i.e.
/// result[i*J + j, n] = a[i,n] * b[j,n].
DenseTensor khatri_rao(const DenseTensor& a, const DenseTensor& b);

/// Contraction of mode m (1-based) against a vector u: the result drops
/// mode m and each entry sums t[..., i_m, ...] * u[i_m] over i_m.
DenseTensor mode_m_product(const DenseTensor& t, const DenseTensor& u, std::size_t m);

/// Contracts the trailing vectors.size() modes of t, in ascending mode
/// order, against the given vectors. Contracting all modes yields an
/// order-0 scalar wrapper.
DenseTensor multi_mode_product(const DenseTensor& t, std::span<const DenseTensor> vectors);

/// Reconstructs the full order-M tensor from CP factors U^(1)..U^(M)
/// (each I_m x k): X[i_1,...,i_M] = sum_r prod_m U^(m)[i_m, r].
DenseTensor cp_to_full(std::span<const DenseTensor> factors);

/// Mode-1 unfolding as an I_1 x (I_2*...*I_M) matrix. Column ordering pins
/// the convention used throughout: mode 2 varies fastest and mode M
/// slowest, so the unfolding of a CP tensor equals
/// U^(1) * (U^(M) kr ... kr U^(2))^T with khatri_rao as defined above.
DenseTensor unfold_mode1(const DenseTensor& t);

/// Inverse of unfold_mode1 for a target shape.
DenseTensor fold_mode1(const DenseTensor& mat, std::vector<std::size_t> shape);

/// A * B^T for an m x k and an n x k matrix.
DenseTensor matmul_nt(const DenseTensor& a, const DenseTensor& b);

/// y = M^T x and y = M x as tensors.
DenseTensor matvec_t(const DenseTensor& m, const DenseTensor& x);
DenseTensor matvec(const DenseTensor& m, const DenseTensor& x);

/// The mixed Khatri-Rao/Hadamard product collapse
///     (A kr B)^T (x kr y) = (A^T x) * (B^T y)
/// evaluated on the cheap right-hand side. With verify set, the left side
/// is also materialized literally and the two are required to agree to
/// 1e-12 relative to the larger magnitude; disagreement throws.
DenseTensor fused_mixed_product(const DenseTensor& a, const DenseTensor& b,
                                const DenseTensor& x, const DenseTensor& y,
                                bool verify = false);

}  // namespace pinet
