#pragma once

// Pointer-level kernel entry points. The per-ISA translation units are built
// with different target flags, so they include nothing beyond this header and
// the intrinsics headers (no inline library templates that could be merged
// across TUs).

#include <cstddef>

namespace kljn::simd::detail {

struct KernelTable {
    double (*sum_squares)(const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpby)(double alpha, const double* x, double beta, const double* y, double* out,
                  std::size_t n);
    void (*multiply)(const double* x, const double* w, double* out, std::size_t n);
    // `interleaved` holds n complex values as (re, im) pairs.
    void (*accumulate_power)(const double* interleaved, double* acc, std::size_t n);
    void (*lorentzian)(double s0, double inv_fcr, const double* f, double* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(KLJN_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(KLJN_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace kljn::simd::detail
