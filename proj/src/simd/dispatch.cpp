#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kljn/simd.hpp"
#include "simd/kernels_impl.hpp"

namespace kljn::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(KLJN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level initial_level() noexcept {
    if (const char* env = std::getenv("KLJN_SIMD")) {
        if (std::string_view(env) == "scalar") return Level::scalar;
    }
    return detected_level();
}

std::atomic<Level>& active() noexcept {
    static std::atomic<Level> level{initial_level()};
    return level;
}

const detail::KernelTable& table(Level level) {
    switch (level) {
        case Level::scalar: return detail::scalar_kernels();
        case Level::avx2:
#if defined(KLJN_HAVE_AVX2)
            if (is_available(Level::avx2)) return detail::avx2_kernels();
#endif
            break;
        case Level::neon:
#if defined(KLJN_HAVE_NEON)
            return detail::neon_kernels();
#endif
            break;
    }
    throw std::invalid_argument("SIMD level not available in this build/CPU");
}

const detail::KernelTable& current() { return table(active().load(std::memory_order_relaxed)); }

void check_same(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("kernel operand sizes differ");
}

const double* as_interleaved(std::span<const std::complex<double>> z) {
    // std::complex<double> is layout-compatible with double[2].
    return reinterpret_cast<const double*>(z.data());
}

}  // namespace

std::string_view to_string(Level level) noexcept {
    switch (level) {
        case Level::scalar: return "scalar";
        case Level::avx2: return "avx2";
        case Level::neon: return "neon";
    }
    return "unknown";
}

bool is_available(Level level) noexcept {
    switch (level) {
        case Level::scalar: return true;
        case Level::avx2: return cpu_has_avx2();
        case Level::neon:
#if defined(KLJN_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Level detected_level() noexcept {
    if (is_available(Level::avx2)) return Level::avx2;
    if (is_available(Level::neon)) return Level::neon;
    return Level::scalar;
}

Level active_level() noexcept { return active().load(std::memory_order_relaxed); }

bool set_active_level(Level level) noexcept {
    if (!is_available(level)) return false;
    active().store(level, std::memory_order_relaxed);
    return true;
}

// --- explicit level -------------------------------------------------------

double sum_squares(Level level, std::span<const double> x) {
    return table(level).sum_squares(x.data(), x.size());
}

double dot(Level level, std::span<const double> a, std::span<const double> b) {
    check_same(a.size(), b.size());
    return table(level).dot(a.data(), b.data(), a.size());
}

void axpby(Level level, double alpha, std::span<const double> x, double beta,
           std::span<const double> y, std::span<double> out) {
    check_same(x.size(), y.size());
    check_same(x.size(), out.size());
    table(level).axpby(alpha, x.data(), beta, y.data(), out.data(), x.size());
}

void multiply(Level level, std::span<const double> x, std::span<const double> w,
              std::span<double> out) {
    check_same(x.size(), w.size());
    check_same(x.size(), out.size());
    table(level).multiply(x.data(), w.data(), out.data(), x.size());
}

void accumulate_power(Level level, std::span<const std::complex<double>> spectrum,
                      std::span<double> acc) {
    check_same(spectrum.size(), acc.size());
    table(level).accumulate_power(as_interleaved(spectrum), acc.data(), acc.size());
}

void lorentzian(Level level, double s0, double f_cr, std::span<const double> freqs,
                std::span<double> out) {
    check_same(freqs.size(), out.size());
    table(level).lorentzian(s0, 1.0 / f_cr, freqs.data(), out.data(), freqs.size());
}

// --- dispatching ------------------------------------------------------------

double sum_squares(std::span<const double> x) { return current().sum_squares(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
    return dot(active_level(), a, b);
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out) {
    axpby(active_level(), alpha, x, beta, y, out);
}

void multiply(std::span<const double> x, std::span<const double> w, std::span<double> out) {
    multiply(active_level(), x, w, out);
}

void accumulate_power(std::span<const std::complex<double>> spectrum, std::span<double> acc) {
    accumulate_power(active_level(), spectrum, acc);
}

void lorentzian(double s0, double f_cr, std::span<const double> freqs, std::span<double> out) {
    lorentzian(active_level(), s0, f_cr, freqs, out);
}

}  // namespace kljn::simd
