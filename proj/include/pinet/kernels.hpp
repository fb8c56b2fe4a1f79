#pragma once

#include <cstddef>

// Low-level dense double-precision kernels behind the tensor and autodiff
// layers. Every kernel has a scalar reference implementation and, on x86-64
// hardware with AVX2, a vectorized variant; the variant is selected once at
// startup. Elementwise kernels (mul/add/sub/scale/axpy and the axpy-based
// matvec_t) produce bit-identical results on every path; reduction kernels
// (dot, matvec) may differ in the last ulps because lane accumulation
// reorders the sum.
//
// The environment variable PINET_SIMD=scalar|avx2|auto overrides selection
// (auto is the default; requesting avx2 on hardware without it falls back
// to scalar).

namespace pinet::kernels {

enum class Isa { scalar, avx2 };

/// The instruction set actually in use after detection and override.
Isa active_isa();
const char* isa_name(Isa isa);

// Elementwise. `out` may alias `a` or `b` exactly (no partial overlap).
void mul(const double* a, const double* b, double* out, std::size_t n);
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void scale(const double* a, double s, double* out, std::size_t n);

/// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);

// Row-major matrices.
/// y = M x, M is rows x cols, y has length rows.
void matvec(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
/// y = M^T x, M is rows x cols, y has length cols. Accumulated row by row,
/// so identical on every ISA path.
void matvec_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);

// Reference and vectorized entry points, exposed so the equivalence tests
// can pin one against the other regardless of what dispatch selected.
namespace detail {

void mul_scalar(const double* a, const double* b, double* out, std::size_t n);
void add_scalar(const double* a, const double* b, double* out, std::size_t n);
void sub_scalar(const double* a, const double* b, double* out, std::size_t n);
void scale_scalar(const double* a, double s, double* out, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
#define PINET_HAVE_AVX2_KERNELS 1
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
void add_avx2(const double* a, const double* b, double* out, std::size_t n);
void sub_avx2(const double* a, const double* b, double* out, std::size_t n);
void scale_avx2(const double* a, double s, double* out, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
#endif

}  // namespace detail

}  // namespace pinet::kernels
