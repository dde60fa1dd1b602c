// AArch64 only; Advanced SIMD is part of the base ISA there.

#include <arm_neon.h>

#include "simd/kernels_impl.hpp"

namespace kljn::simd::detail {

namespace {

double sum_squares(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t v0 = vld1q_f64(x + i), v1 = vld1q_f64(x + i + 2);
        a0 = vfmaq_f64(a0, v0, v0);
        a1 = vfmaq_f64(a1, v1, v1);
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(a + i), vld1q_f64(b + i));
        a1 = vfmaq_f64(a1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpby(double alpha, const double* x, double beta, const double* y, double* out,
           std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha), vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vmulq_f64(vb, vld1q_f64(y + i));
        vst1q_f64(out + i, vfmaq_f64(t, va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void multiply(const double* x, const double* w, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(w + i)));
    for (; i < n; ++i) out[i] = x[i] * w[i];
}

void accumulate_power(const double* z, double* acc, std::size_t n) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2x2_t v = vld2q_f64(z + 2 * k);  // deinterleaves re / im
        const float64x2_t mag = vfmaq_f64(vmulq_f64(v.val[0], v.val[0]), v.val[1], v.val[1]);
        vst1q_f64(acc + k, vaddq_f64(vld1q_f64(acc + k), mag));
    }
    for (; k < n; ++k) {
        const double re = z[2 * k], im = z[2 * k + 1];
        acc[k] += re * re + im * im;
    }
}

void lorentzian(double s0, double inv_fcr, const double* f, double* out, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s0), vi = vdupq_n_f64(inv_fcr), one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vmulq_f64(vld1q_f64(f + i), vi);
        vst1q_f64(out + i, vdivq_f64(vs, vfmaq_f64(one, x, x)));
    }
    for (; i < n; ++i) {
        const double x = f[i] * inv_fcr;
        out[i] = s0 / (1.0 + x * x);
    }
}

constexpr KernelTable kTable{sum_squares, dot, axpby, multiply, accumulate_power, lorentzian};

}  // namespace

const KernelTable& neon_kernels() noexcept { return kTable; }

}  // namespace kljn::simd::detail
