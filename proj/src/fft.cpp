#include "kljn/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <new>
#include <utility>

#include "kljn/errors.hpp"

namespace kljn {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    if (n < 2) throw Error(Errc::invalid_argument, "FFT length must be >= 2");
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(n);
    complex_ = fftw_alloc_complex(n / 2 + 1);
    if (real_ == nullptr || complex_ == nullptr) {
        release();
        throw std::bad_alloc();
    }
    auto* c = static_cast<fftw_complex*>(complex_);
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, c, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(len, c, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    release();
}

void RealFft::release() noexcept {
    if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    if (real_ != nullptr) fftw_free(real_);
    if (complex_ != nullptr) fftw_free(complex_);
    forward_plan_ = inverse_plan_ = nullptr;
    real_ = nullptr;
    complex_ = nullptr;
}

RealFft::RealFft(RealFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      complex_(std::exchange(other.complex_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
    if (this != &other) {
        {
            std::lock_guard lock(planner_mutex());
            release();
        }
        n_ = std::exchange(other.n_, 0);
        real_ = std::exchange(other.real_, nullptr);
        complex_ = std::exchange(other.complex_, nullptr);
        forward_plan_ = std::exchange(other.forward_plan_, nullptr);
        inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    }
    return *this;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    if (in.size() != n_ || out.size() != bins()) {
        throw Error(Errc::invalid_argument, "RealFft::forward size mismatch");
    }
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    const auto* c = static_cast<const std::complex<double>*>(complex_);
    std::copy(c, c + bins(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != bins() || out.size() != n_) {
        throw Error(Errc::invalid_argument, "RealFft::inverse size mismatch");
    }
    auto* c = static_cast<std::complex<double>*>(complex_);
    std::copy(in.begin(), in.end(), c);
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(real_, real_ + n_, out.begin());
}

}  // namespace kljn
