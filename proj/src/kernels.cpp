#include "pinet/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pinet::kernels {

namespace detail {

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_scalar(const double* a, double s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

namespace {

struct Dispatch {
    Isa isa;
    void (*mul)(const double*, const double*, double*, std::size_t);
    void (*add)(const double*, const double*, double*, std::size_t);
    void (*sub)(const double*, const double*, double*, std::size_t);
    void (*scale)(const double*, double, double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
};

bool avx2_supported() {
#if defined(PINET_HAVE_AVX2_KERNELS) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Dispatch make_dispatch() {
    Isa isa = Isa::scalar;
    const char* env = std::getenv("PINET_SIMD");
    bool want_avx2 = true;
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) want_avx2 = false;
        // "avx2" and "auto" both mean: use it if the CPU has it.
    }
    if (want_avx2 && avx2_supported()) isa = Isa::avx2;

    Dispatch d{};
    d.isa = isa;
#ifdef PINET_HAVE_AVX2_KERNELS
    if (isa == Isa::avx2) {
        d.mul = detail::mul_avx2;
        d.add = detail::add_avx2;
        d.sub = detail::sub_avx2;
        d.scale = detail::scale_avx2;
        d.axpy = detail::axpy_avx2;
        d.dot = detail::dot_avx2;
        return d;
    }
#endif
    d.mul = detail::mul_scalar;
    d.add = detail::add_scalar;
    d.sub = detail::sub_scalar;
    d.scale = detail::scale_scalar;
    d.axpy = detail::axpy_scalar;
    d.dot = detail::dot_scalar;
    return d;
}

const Dispatch& dispatch() {
    static const Dispatch d = make_dispatch();
    return d;
}

}  // namespace

Isa active_isa() { return dispatch().isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    dispatch().mul(a, b, out, n);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
    dispatch().add(a, b, out, n);
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    dispatch().sub(a, b, out, n);
}

void scale(const double* a, double s, double* out, std::size_t n) {
    dispatch().scale(a, s, out, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().axpy(alpha, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().dot(a, b, n);
}

void matvec(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

void matvec_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy(x[r], m + r * cols, y, cols);
}

}  // namespace pinet::kernels
