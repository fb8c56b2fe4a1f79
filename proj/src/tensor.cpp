#include "pinet/tensor.hpp"

#include <cmath>
#include <sstream>

#include "pinet/kernels.hpp"

namespace pinet {

namespace {

std::size_t checked_product(std::span<const std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw shape_error("tensor extents must be positive, got shape " + shape_to_string(shape));
        n *= e;
    }
    return n;
}

void require_matrix(const DenseTensor& t, const char* who) {
    if (t.order() != 2)
        throw shape_error(std::string(who) + ": expected a matrix, got order-" + std::to_string(t.order()) +
                          " tensor " + t.shape_str());
}

void require_vector(const DenseTensor& t, const char* who) {
    if (t.order() != 1)
        throw shape_error(std::string(who) + ": expected a vector, got order-" + std::to_string(t.order()) +
                          " tensor " + t.shape_str());
}

}  // namespace

std::string shape_to_string(std::span<const std::size_t> shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

std::size_t flat_index(std::span<const std::size_t> shape, std::span<const std::size_t> idx) {
    if (shape.size() != idx.size())
        throw shape_error("index rank " + std::to_string(idx.size()) + " does not match tensor order " +
                          std::to_string(shape.size()));
    std::size_t flat = 0;
    for (std::size_t m = 0; m < shape.size(); ++m) {
        if (idx[m] >= shape[m])
            throw shape_error("index " + std::to_string(idx[m]) + " out of range for extent " +
                              std::to_string(shape[m]) + " in mode " + std::to_string(m + 1));
        flat = flat * shape[m] + idx[m];
    }
    return flat;
}

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_product(shape_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_product(shape_) != data_.size())
        throw shape_error("data length " + std::to_string(data_.size()) + " does not match shape " +
                          shape_to_string(shape_));
}

DenseTensor DenseTensor::scalar(double v) {
    DenseTensor t;
    t.data_[0] = v;
    return t;
}

DenseTensor DenseTensor::vector(std::vector<double> v) {
    std::vector<std::size_t> shape{v.size()};
    return DenseTensor(std::move(shape), std::move(v));
}

DenseTensor DenseTensor::matrix(std::size_t rows, std::size_t cols) {
    return DenseTensor({rows, cols});
}

DenseTensor DenseTensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return DenseTensor({rows, cols}, std::move(data));
}

std::size_t DenseTensor::extent(std::size_t mode) const {
    if (mode < 1 || mode > order())
        throw shape_error("mode " + std::to_string(mode) + " out of range for order-" +
                          std::to_string(order()) + " tensor");
    return shape_[mode - 1];
}

std::size_t DenseTensor::rows() const {
    require_matrix(*this, "rows");
    return shape_[0];
}

std::size_t DenseTensor::cols() const {
    require_matrix(*this, "cols");
    return shape_[1];
}

double& DenseTensor::at(std::span<const std::size_t> idx) {
    return data_[flat_index(shape_, idx)];
}

double DenseTensor::at(std::span<const std::size_t> idx) const {
    return data_[flat_index(shape_, idx)];
}

double& DenseTensor::at(std::initializer_list<std::size_t> idx) {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

double DenseTensor::at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
}

bool DenseTensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double DenseTensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

std::string DenseTensor::shape_str() const { return shape_to_string(shape_); }

// ---------------------------------------------------------------------------

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    if (!a.same_shape(b))
        throw shape_error("hadamard: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    DenseTensor out(a.shape());
    kernels::mul(a.data(), b.data(), out.data(), a.size());
    return out;
}

DenseTensor add(const DenseTensor& a, const DenseTensor& b) {
    if (!a.same_shape(b))
        throw shape_error("add: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    DenseTensor out(a.shape());
    kernels::add(a.data(), b.data(), out.data(), a.size());
    return out;
}

DenseTensor sub(const DenseTensor& a, const DenseTensor& b) {
    if (!a.same_shape(b))
        throw shape_error("sub: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    DenseTensor out(a.shape());
    kernels::sub(a.data(), b.data(), out.data(), a.size());
    return out;
}

DenseTensor scale(const DenseTensor& a, double s) {
    DenseTensor out(a.shape());
    kernels::scale(a.data(), s, out.data(), a.size());
    return out;
}

DenseTensor khatri_rao(const DenseTensor& a, const DenseTensor& b) {
    require_matrix(a, "khatri_rao");
    require_matrix(b, "khatri_rao");
    if (a.cols() != b.cols())
        throw shape_error("khatri_rao: column counts differ, " + a.shape_str() + " vs " + b.shape_str());
    const std::size_t i_ext = a.rows(), j_ext = b.rows(), n_cols = a.cols();
    DenseTensor out = DenseTensor::matrix(i_ext * j_ext, n_cols);
    for (std::size_t i = 0; i < i_ext; ++i)
        for (std::size_t j = 0; j < j_ext; ++j)
            for (std::size_t n = 0; n < n_cols; ++n)
                out[(i * j_ext + j) * n_cols + n] = a[i * n_cols + n] * b[j * n_cols + n];
    return out;
}

DenseTensor mode_m_product(const DenseTensor& t, const DenseTensor& u, std::size_t m) {
    require_vector(u, "mode_m_product");
    const std::size_t order = t.order();
    if (m < 1 || m > order)
        throw shape_error("mode_m_product: mode " + std::to_string(m) + " out of range for order-" +
                          std::to_string(order) + " tensor");
    if (u.size() != t.extent(m))
        throw shape_error("mode_m_product: vector extent " + std::to_string(u.size()) +
                          " does not match mode-" + std::to_string(m) + " extent " +
                          std::to_string(t.extent(m)));

    // Split the flat layout into (outer, contracted, inner) strides around
    // mode m; row-major means inner = product of extents after mode m.
    std::size_t inner = 1;
    for (std::size_t k = m; k < order; ++k) inner *= t.shape()[k];
    const std::size_t ext = t.shape()[m - 1];
    std::size_t outer = t.size() / (inner * ext);

    std::vector<std::size_t> out_shape;
    out_shape.reserve(order - 1);
    for (std::size_t k = 0; k < order; ++k)
        if (k != m - 1) out_shape.push_back(t.shape()[k]);
    if (out_shape.empty()) {
        // Full contraction of an order-1 tensor.
        double acc = kernels::dot(t.data(), u.data(), ext);
        return DenseTensor::scalar(acc);
    }

    DenseTensor out(out_shape);
    const double* src = t.data();
    double* dst = out.data();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < ext; ++i)
            kernels::axpy(u[i], src + (o * ext + i) * inner, dst + o * inner, inner);
    return out;
}

DenseTensor multi_mode_product(const DenseTensor& t, std::span<const DenseTensor> vectors) {
    if (vectors.size() > t.order())
        throw shape_error("multi_mode_product: " + std::to_string(vectors.size()) +
                          " vectors for an order-" + std::to_string(t.order()) + " tensor");
    DenseTensor cur = t;
    // Contract the trailing modes, highest first, so earlier mode numbers
    // stay valid as the order shrinks.
    for (std::size_t j = vectors.size(); j-- > 0;) {
        std::size_t mode = cur.order() - (vectors.size() - 1 - j);
        cur = mode_m_product(cur, vectors[j], mode);
    }
    return cur;
}

DenseTensor cp_to_full(std::span<const DenseTensor> factors) {
    if (factors.empty()) throw shape_error("cp_to_full: no factors");
    const std::size_t rank = factors.front().cols();
    std::vector<std::size_t> shape;
    shape.reserve(factors.size());
    for (const DenseTensor& f : factors) {
        require_matrix(f, "cp_to_full");
        if (f.cols() != rank)
            throw shape_error("cp_to_full: factor rank mismatch, " + std::to_string(f.cols()) +
                              " vs " + std::to_string(rank));
        shape.push_back(f.rows());
    }

    DenseTensor out(shape);
    const std::size_t m_count = factors.size();
    std::vector<std::size_t> idx(m_count, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rank; ++r) {
            double term = 1.0;
            for (std::size_t m = 0; m < m_count; ++m) term *= factors[m][idx[m] * rank + r];
            acc += term;
        }
        out[flat] = acc;
        for (std::size_t m = m_count; m-- > 0;) {
            if (++idx[m] < shape[m]) break;
            idx[m] = 0;
        }
    }
    return out;
}

DenseTensor unfold_mode1(const DenseTensor& t) {
    if (t.order() < 1) throw shape_error("unfold_mode1: order-0 tensor");
    const std::size_t rows = t.shape()[0];
    const std::size_t cols = t.size() / rows;
    DenseTensor out = DenseTensor::matrix(rows, cols);
    // Row-major storage has mode M fastest; the unfolding column index wants
    // mode 2 fastest. Walk the multi-index explicitly.
    const std::size_t order = t.order();
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        std::size_t col = 0;
        for (std::size_t m = order; m-- > 1;) col = col * t.shape()[m] + idx[m];
        out[idx[0] * cols + col] = t[flat];
        for (std::size_t m = order; m-- > 0;) {
            if (++idx[m] < t.shape()[m]) break;
            idx[m] = 0;
        }
    }
    return out;
}

DenseTensor fold_mode1(const DenseTensor& mat, std::vector<std::size_t> shape) {
    require_matrix(mat, "fold_mode1");
    DenseTensor out(shape);
    if (out.size() != mat.size() || shape.empty() || shape[0] != mat.rows())
        throw shape_error("fold_mode1: matrix " + mat.shape_str() + " does not fold to " +
                          shape_to_string(shape));
    const std::size_t order = shape.size();
    const std::size_t cols = mat.cols();
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t col = 0;
        for (std::size_t m = order; m-- > 1;) col = col * shape[m] + idx[m];
        out[flat] = mat[idx[0] * cols + col];
        for (std::size_t m = order; m-- > 0;) {
            if (++idx[m] < shape[m]) break;
            idx[m] = 0;
        }
    }
    return out;
}

DenseTensor matmul_nt(const DenseTensor& a, const DenseTensor& b) {
    require_matrix(a, "matmul_nt");
    require_matrix(b, "matmul_nt");
    if (a.cols() != b.cols())
        throw shape_error("matmul_nt: inner extents differ, " + a.shape_str() + " vs " + b.shape_str());
    DenseTensor out = DenseTensor::matrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out[i * b.rows() + j] = kernels::dot(a.data() + i * a.cols(), b.data() + j * b.cols(), a.cols());
    return out;
}

DenseTensor matvec_t(const DenseTensor& m, const DenseTensor& x) {
    require_matrix(m, "matvec_t");
    require_vector(x, "matvec_t");
    if (x.size() != m.rows())
        throw shape_error("matvec_t: vector length " + std::to_string(x.size()) +
                          " does not match matrix " + m.shape_str());
    DenseTensor out({m.cols()});
    kernels::matvec_t(m.data(), m.rows(), m.cols(), x.data(), out.data());
    return out;
}

DenseTensor matvec(const DenseTensor& m, const DenseTensor& x) {
    require_matrix(m, "matvec");
    require_vector(x, "matvec");
    if (x.size() != m.cols())
        throw shape_error("matvec: vector length " + std::to_string(x.size()) +
                          " does not match matrix " + m.shape_str());
    DenseTensor out({m.rows()});
    kernels::matvec(m.data(), m.rows(), m.cols(), x.data(), out.data());
    return out;
}

DenseTensor fused_mixed_product(const DenseTensor& a, const DenseTensor& b,
                                const DenseTensor& x, const DenseTensor& y, bool verify) {
    require_matrix(a, "fused_mixed_product");
    require_matrix(b, "fused_mixed_product");
    if (a.cols() != b.cols())
        throw shape_error("fused_mixed_product: column counts differ, " + a.shape_str() + " vs " +
                          b.shape_str());
    DenseTensor rhs = hadamard(matvec_t(a, x), matvec_t(b, y));
    if (verify) {
        // Literal left side: (A kr B)^T applied to the Kronecker stack of x, y.
        DenseTensor xy({x.size() * y.size()});
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) xy[i * y.size() + j] = x[i] * y[j];
        DenseTensor lhs = matvec_t(khatri_rao(a, b), xy);
        double scale = std::max({lhs.max_abs(), rhs.max_abs(), 1e-300});
        for (std::size_t r = 0; r < rhs.size(); ++r) {
            if (std::fabs(lhs[r] - rhs[r]) > 1e-12 * scale)
                throw std::runtime_error("fused_mixed_product: identity violated at coordinate " +
                                         std::to_string(r));
        }
    }
    return rhs;
}

}  // namespace pinet
