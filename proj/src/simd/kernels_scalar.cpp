#include "simd/kernels_impl.hpp"

namespace kljn::simd::detail {

namespace {

double sum_squares(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpby(double alpha, const double* x, double beta, const double* y, double* out,
           std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void multiply(const double* x, const double* w, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * w[i];
}

void accumulate_power(const double* z, double* acc, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double re = z[2 * k], im = z[2 * k + 1];
        acc[k] += re * re + im * im;
    }
}

void lorentzian(double s0, double inv_fcr, const double* f, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f[i] * inv_fcr;
        out[i] = s0 / (1.0 + x * x);
    }
}

constexpr KernelTable kTable{sum_squares, dot, axpby, multiply, accumulate_power, lorentzian};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kTable; }

}  // namespace kljn::simd::detail
