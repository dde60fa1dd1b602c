#pragma once

// Time-domain simulation of the wire during one bit period: band-limited
// Gaussian generator noise, first-order cable filtering, and the measurements
// an observer can make on the resulting waveforms.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kljn/circuit.hpp"

namespace kljn {

/// Minimum ratio of sample rate to the highest frequency in play.
inline constexpr double kOversampling = 20.0;

class SimulationGrid {
public:
    SimulationGrid(double sample_rate_hz, double duration_s);

    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    double duration_s() const noexcept { return duration_s_; }
    /// round(sample_rate · duration)
    std::size_t samples() const noexcept { return samples_; }

    /// Throws Error(invalid_argument) unless sample_rate >= 20·max(B, max_crossover).
    /// Infinite crossovers are ignored.
    void require_resolves(double bandwidth_b, double max_crossover) const;

    friend bool operator==(const SimulationGrid&, const SimulationGrid&) = default;

private:
    double sample_rate_hz_, duration_s_;
    std::size_t samples_;
};

/// Largest finite voltage/current crossover among `states` (0 if none is finite).
double max_finite_crossover(const ResistorQuad& quad, const CableModel& cable,
                            std::span<const BitState> states);
/// 20·max(B, largest finite crossover among `states`).
double minimum_sample_rate(const ResistorQuad& quad, const CableModel& cable, double bandwidth_b,
                           std::span<const BitState> states);

/// Sampled real signal; finite values only, at least two samples.
class Waveform {
public:
    Waveform(std::vector<double> samples, double sample_rate_hz);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

/// One-sided power spectral density estimate.
struct SpectrumEstimate {
    std::vector<double> frequencies;  // ascending, starting at 0
    std::vector<double> psd;
    double resolution_hz = 0.0;
    std::size_t segments = 0;

    /// Linear interpolation between bins; f must lie within [0, last frequency].
    double value_at(double f) const;
    /// Σ psd·Δf, the estimate's total power.
    double integral() const;
};

/// Zero-mean Gaussian noise with a flat PSD of rms²/B on (0, B] and nothing
/// above B, synthesized in the frequency domain. Throws
/// Error(bandwidth_exceeds_nyquist) when B > fs/2.
Waveform synth_band_limited_gaussian(double rms, double bandwidth_b, const SimulationGrid& grid,
                                     std::uint64_t seed);

/// Single-pole low-pass (bilinear transform, prewarped so the -3 dB point is
/// exactly at `cutoff_hz`, unity gain at DC).
class FirstOrderLowPass {
public:
    FirstOrderLowPass(double cutoff_hz, double sample_rate_hz);

    double process(double x) noexcept {
        const double y = b0_ * (x + x_prev_) - a1_ * y_prev_;
        x_prev_ = x;
        y_prev_ = y;
        return y;
    }
    void process(std::span<double> inout) noexcept;
    void reset() noexcept { x_prev_ = y_prev_ = 0.0; }

    /// |H(f)|² of the discrete filter.
    double power_response(double f) const noexcept;

private:
    double b0_, a1_;
    double cutoff_hz_, sample_rate_hz_;
    double x_prev_ = 0.0, y_prev_ = 0.0;
};

struct BitPeriodWaveforms {
    Waveform wire_voltage;
    Waveform wire_current;
};

/// Simulates the wire voltage (Thevenin superposition through R_p, shunt C_c)
/// and wire current (series loop through R_s and L_c) for one bit period.
/// A settling prefix of ten filter time constants is simulated and discarded.
BitPeriodWaveforms simulate_bit_period(BitState state, const ResistorQuad& quad,
                                       const GeneratorSet& gens, const CableModel& cable,
                                       const SimulationGrid& grid, std::uint64_t seed);

struct WelchOptions {
    std::size_t segment_len = 4096;
    double overlap_fraction = 0.5;
};

/// Hann-windowed averaged periodogram, one-sided, scaled so integral() equals
/// the mean square. Throws Error(segment_too_long) when the segment exceeds
/// the waveform.
SpectrumEstimate welch_psd(const Waveform& w, std::size_t segment_len, double overlap_fraction);
inline SpectrumEstimate welch_psd(const Waveform& w, const WelchOptions& opt = {}) {
    return welch_psd(w, opt.segment_len, opt.overlap_fraction);
}

double mean_square(const Waveform& w);
double mean_square(std::span<const double> samples);

/// Writes samples as little-endian float64 to `path` and a JSON sidecar
/// (`path` + ".json") holding sample_rate_hz, units, seed and count.
void write_waveform(const std::filesystem::path& path, const Waveform& w, const std::string& units,
                    std::uint64_t seed);
Waveform read_waveform(const std::filesystem::path& path);

/// CSV with header "frequency_hz,psd".
void write_psd_csv(const std::filesystem::path& path, const SpectrumEstimate& spectrum);

}  // namespace kljn
