// Built with -mavx2 -mfma. Selected at runtime only when the CPU reports both.

#include <immintrin.h>

#include "simd/kernels_impl.hpp"

namespace kljn::simd::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_squares(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d v0 = _mm256_loadu_pd(x + i);
        const __m256d v1 = _mm256_loadu_pd(x + i + 4);
        a0 = _mm256_fmadd_pd(v0, v0, a0);
        a1 = _mm256_fmadd_pd(v1, v1, a1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        a0 = _mm256_fmadd_pd(v, v, a0);
    }
    double acc = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), a1);
    }
    for (; i + 4 <= n; i += 4) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), a0);
    }
    double acc = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpby(double alpha, const double* x, double beta, const double* y, double* out,
           std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha), vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void multiply(const double* x, const double* w, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i)));
    }
    for (; i < n; ++i) out[i] = x[i] * w[i];
}

void accumulate_power(const double* z, double* acc, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_loadu_pd(z + 2 * k);      // re0 im0 re1 im1
        const __m256d q = _mm256_loadu_pd(z + 2 * k + 4);  // re2 im2 re3 im3
        // hadd -> |z0|² |z2|² |z1|² |z3|², then restore order.
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(p, p), _mm256_mul_pd(q, q));
        const __m256d mag = _mm256_permute4x64_pd(h, 0xD8);
        _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), mag));
    }
    for (; k < n; ++k) {
        const double re = z[2 * k], im = z[2 * k + 1];
        acc[k] += re * re + im * im;
    }
}

void lorentzian(double s0, double inv_fcr, const double* f, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s0), vi = _mm256_set1_pd(inv_fcr), one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(f + i), vi);
        _mm256_storeu_pd(out + i, _mm256_div_pd(vs, _mm256_fmadd_pd(x, x, one)));
    }
    for (; i < n; ++i) {
        const double x = f[i] * inv_fcr;
        out[i] = s0 / (1.0 + x * x);
    }
}

constexpr KernelTable kTable{sum_squares, dot, axpby, multiply, accumulate_power, lorentzian};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kTable; }

}  // namespace kljn::simd::detail
