#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// vectorized variants (AVX2+FMA on x86-64, NEON on AArch64). The active
// variant is chosen once at startup from CPU features; KLJN_SIMD=scalar in the
// environment forces the reference path.

#include <complex>
#include <span>
#include <string_view>

namespace kljn::simd {

enum class Level { scalar, avx2, neon };

std::string_view to_string(Level level) noexcept;

/// Best level supported by this build and CPU.
Level detected_level() noexcept;
/// Level currently used by the dispatching entry points.
Level active_level() noexcept;
/// Overrides the active level; returns false (and changes nothing) if the
/// level is not available here.
bool set_active_level(Level level) noexcept;
bool is_available(Level level) noexcept;

/// Σ x[i]²
double sum_squares(std::span<const double> x);
/// Σ a[i]·b[i]
double dot(std::span<const double> a, std::span<const double> b);
/// out[i] = alpha·x[i] + beta·y[i]
void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out);
/// out[i] = x[i]·w[i]
void multiply(std::span<const double> x, std::span<const double> w, std::span<double> out);
/// acc[k] += |X[k]|²
void accumulate_power(std::span<const std::complex<double>> spectrum, std::span<double> acc);
/// out[i] = s0 / (1 + (f[i]/f_cr)²)
void lorentzian(double s0, double f_cr, std::span<const double> freqs, std::span<double> out);

/// Explicit-level entry points, used by the equivalence tests.
double sum_squares(Level level, std::span<const double> x);
double dot(Level level, std::span<const double> a, std::span<const double> b);
void axpby(Level level, double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out);
void multiply(Level level, std::span<const double> x, std::span<const double> w,
              std::span<double> out);
void accumulate_power(Level level, std::span<const std::complex<double>> spectrum,
                      std::span<double> acc);
void lorentzian(Level level, double s0, double f_cr, std::span<const double> freqs,
                std::span<double> out);

}  // namespace kljn::simd
