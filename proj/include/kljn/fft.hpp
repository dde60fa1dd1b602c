#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace kljn {

/// Real-input FFT of a fixed length backed by FFTW. Owns its plans and aligned
/// work buffers; one instance must not be used from two threads at once, but
/// separate instances may run concurrently.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    /// X[k] = Σ x[t]·exp(-2πi k t / n), k = 0 .. n/2.
    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    /// x[t] = Σ_{k=0}^{n-1} X[k]·exp(+2πi k t / n) with Hermitian extension; unnormalized.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    void release() noexcept;

    std::size_t n_ = 0;
    double* real_ = nullptr;
    void* complex_ = nullptr;  // fftw_complex*
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace kljn
