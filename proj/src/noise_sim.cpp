#include "kljn/noise_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "kljn/errors.hpp"
#include "kljn/fft.hpp"
#include "kljn/rng.hpp"
#include "kljn/simd.hpp"

namespace kljn {

// ---------------------------------------------------------------------------
// Grid and waveform types

SimulationGrid::SimulationGrid(double sample_rate_hz, double duration_s)
    : sample_rate_hz_(sample_rate_hz), duration_s_(duration_s), samples_(0) {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw Error(Errc::invalid_argument, "sample rate must be finite and > 0");
    }
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw Error(Errc::invalid_argument, "duration must be finite and > 0");
    }
    samples_ = static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
    if (samples_ < 2) throw Error(Errc::invalid_argument, "grid holds fewer than two samples");
}

void SimulationGrid::require_resolves(double bandwidth_b, double max_crossover) const {
    double top = bandwidth_b;
    if (std::isfinite(max_crossover)) top = std::max(top, max_crossover);
    if (sample_rate_hz_ < kOversampling * top * (1.0 - 1e-12)) {
        throw Error(Errc::invalid_argument,
                    "sample rate " + std::to_string(sample_rate_hz_) + " Hz is below 20 x " +
                        std::to_string(top) + " Hz");
    }
}

double max_finite_crossover(const ResistorQuad& quad, const CableModel& cable,
                            std::span<const BitState> states) {
    double top = 0.0;
    for (BitState s : states) {
        const auto [fu, fi] = state_crossovers(quad, cable, s);
        if (std::isfinite(fu)) top = std::max(top, fu);
        if (std::isfinite(fi)) top = std::max(top, fi);
    }
    return top;
}

double minimum_sample_rate(const ResistorQuad& quad, const CableModel& cable, double bandwidth_b,
                           std::span<const BitState> states) {
    return kOversampling * std::max(bandwidth_b, max_finite_crossover(quad, cable, states));
}

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.size() < 2) throw Error(Errc::invalid_argument, "waveform needs >= 2 samples");
    if (!(sample_rate_hz > 0.0)) throw Error(Errc::invalid_argument, "sample rate must be > 0");
    for (double v : samples_) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "waveform holds non-finite sample");
    }
}

double SpectrumEstimate::value_at(double f) const {
    if (frequencies.empty() || f < frequencies.front() || f > frequencies.back()) {
        throw Error(Errc::invalid_argument, "frequency outside spectrum support");
    }
    const double pos = f / resolution_hz;
    const auto i = std::min(static_cast<std::size_t>(pos), psd.size() - 2);
    const double t = pos - static_cast<double>(i);
    return psd[i] * (1.0 - t) + psd[i + 1] * t;
}

double SpectrumEstimate::integral() const {
    double acc = 0.0;
    for (double p : psd) acc += p;
    return acc * resolution_hz;
}

// ---------------------------------------------------------------------------
// Noise synthesis

namespace {

// Fills `out` (length = fft size) with band-limited noise; rng supplies the
// Fourier coefficients a_k, b_k ~ N(0, rms²/K) for the K bins in (0, B].
void synth_into(double rms, double bandwidth_b, double sample_rate_hz, Rng& rng,
                std::span<double> out) {
    const std::size_t n = out.size();
    if (bandwidth_b > sample_rate_hz / 2.0) {
        throw Error(Errc::bandwidth_exceeds_nyquist,
                    "B = " + std::to_string(bandwidth_b) + " Hz exceeds fs/2");
    }
    const auto top_bin = static_cast<std::size_t>(
        std::floor(bandwidth_b * static_cast<double>(n) / sample_rate_hz * (1.0 + 1e-12)));
    // The Nyquist bin is real-only and is never used, so every bin carries rms²/K.
    const std::size_t k_max = std::min(top_bin, (n - 1) / 2);
    if (k_max == 0) {
        throw Error(Errc::invalid_argument, "duration too short to resolve the noise bandwidth");
    }
    if (rms == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double sigma = rms / std::sqrt(static_cast<double>(k_max));
    std::vector<std::complex<double>> spectrum(n / 2 + 1);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const double a = sigma * rng.gaussian();
        const double b = sigma * rng.gaussian();
        spectrum[k] = {0.5 * a, -0.5 * b};  // -> a·cos + b·sin after the inverse transform
    }
    RealFft fft(n);
    fft.inverse(spectrum, out);
}

std::size_t settling_samples(double f_cr, double sample_rate_hz) {
    if (!std::isfinite(f_cr)) return 0;
    return static_cast<std::size_t>(
        std::ceil(10.0 * sample_rate_hz / (2.0 * std::numbers::pi * f_cr)));
}

}  // namespace

Waveform synth_band_limited_gaussian(double rms, double bandwidth_b, const SimulationGrid& grid,
                                     std::uint64_t seed) {
    if (!(rms >= 0.0)) throw Error(Errc::invalid_argument, "rms must be >= 0");
    if (!(bandwidth_b > 0.0)) throw Error(Errc::invalid_argument, "bandwidth must be > 0");
    std::vector<double> samples(grid.samples());
    Rng rng(seed);
    synth_into(rms, bandwidth_b, grid.sample_rate_hz(), rng, samples);
    return {std::move(samples), grid.sample_rate_hz()};
}

// ---------------------------------------------------------------------------
// Filtering

FirstOrderLowPass::FirstOrderLowPass(double cutoff_hz, double sample_rate_hz)
    : b0_(0.0), a1_(0.0), cutoff_hz_(cutoff_hz), sample_rate_hz_(sample_rate_hz) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
        throw Error(Errc::invalid_argument, "filter cutoff must lie in (0, fs/2)");
    }
    const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    b0_ = k / (k + 1.0);
    a1_ = (k - 1.0) / (k + 1.0);
}

void FirstOrderLowPass::process(std::span<double> inout) noexcept {
    for (double& v : inout) v = process(v);
}

double FirstOrderLowPass::power_response(double f) const noexcept {
    const double c = std::cos(2.0 * std::numbers::pi * f / sample_rate_hz_);
    return b0_ * b0_ * 2.0 * (1.0 + c) / (1.0 + 2.0 * a1_ * c + a1_ * a1_);
}

BitPeriodWaveforms simulate_bit_period(BitState state, const ResistorQuad& quad,
                                       const GeneratorSet& gens, const CableModel& cable,
                                       const SimulationGrid& grid, std::uint64_t seed) {
    const double fs = grid.sample_rate_hz();
    const double b = gens.bandwidth_b();
    const auto [fu, fi] = state_crossovers(quad, cable, state);
    const BitState only[] = {state};
    grid.require_resolves(b, max_finite_crossover(quad, cable, only));

    const std::size_t n = grid.samples();
    const std::size_t warm = std::max(settling_samples(fu, fs), settling_samples(fi, fs));
    const std::size_t total = n + warm;

    const auto [ra, rb] = quad.connected(state);
    const auto [ua, ub] = gens.connected(state);
    const double rs = ra + rb;

    std::vector<double> gen_a(total), gen_b(total);
    {
        Rng rng_a(derive_seed(seed, 0));
        Rng rng_b(derive_seed(seed, 1));
        synth_into(ua, b, fs, rng_a, gen_a);
        synth_into(ub, b, fs, rng_b, gen_b);
    }

    // Open-circuit (Thevenin) wire voltage and short-loop current.
    std::vector<double> voltage(total), current(total);
    simd::axpby(rb / rs, gen_a, ra / rs, gen_b, voltage);
    simd::axpby(1.0 / rs, gen_a, -1.0 / rs, gen_b, current);

    if (std::isfinite(fu)) FirstOrderLowPass(fu, fs).process(voltage);
    if (std::isfinite(fi)) FirstOrderLowPass(fi, fs).process(current);

    voltage.erase(voltage.begin(), voltage.begin() + static_cast<std::ptrdiff_t>(warm));
    current.erase(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(warm));
    return {Waveform(std::move(voltage), fs), Waveform(std::move(current), fs)};
}

// ---------------------------------------------------------------------------
// Measurement

SpectrumEstimate welch_psd(const Waveform& w, std::size_t segment_len, double overlap_fraction) {
    if (segment_len < 2) throw Error(Errc::invalid_argument, "segment length must be >= 2");
    if (segment_len > w.size()) {
        throw Error(Errc::segment_too_long, "segment of " + std::to_string(segment_len) +
                                                " samples exceeds waveform of " +
                                                std::to_string(w.size()));
    }
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
        throw Error(Errc::invalid_argument, "overlap fraction must lie in [0, 1)");
    }
    const std::size_t len = segment_len;
    const auto overlap = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(len)));
    const std::size_t step = std::max<std::size_t>(1, len - std::min(overlap, len - 1));

    std::vector<double> window(len);
    double window_power = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(len)));
        window_power += window[i] * window[i];
    }

    RealFft fft(len);
    const std::size_t bins = fft.bins();
    std::vector<double> acc(bins, 0.0), seg(len);
    std::vector<std::complex<double>> spectrum(bins);
    const auto x = w.samples();
    std::size_t count = 0;
    for (std::size_t start = 0; start + len <= x.size(); start += step, ++count) {
        simd::multiply(x.subspan(start, len), window, seg);
        fft.forward(seg, spectrum);
        simd::accumulate_power(spectrum, acc);
    }

    const double fs = w.sample_rate_hz();
    const double scale = 1.0 / (fs * window_power * static_cast<double>(count));
    SpectrumEstimate out;
    out.resolution_hz = fs / static_cast<double>(len);
    out.segments = count;
    out.frequencies.resize(bins);
    out.psd.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (len % 2 == 0 && k == bins - 1);
        out.frequencies[k] = static_cast<double>(k) * out.resolution_hz;
        out.psd[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
    }
    return out;
}

double mean_square(std::span<const double> samples) {
    if (samples.empty()) throw Error(Errc::invalid_argument, "mean square of empty sequence");
    return simd::sum_squares(samples) / static_cast<double>(samples.size());
}

double mean_square(const Waveform& w) { return mean_square(w.samples()); }

// ---------------------------------------------------------------------------
// Export

void write_waveform(const std::filesystem::path& path, const Waveform& w, const std::string& units,
                    std::uint64_t seed) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw Error(Errc::io_error, "cannot open " + path.string());
    for (double v : w.samples()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
        bin.write(bytes, 8);
    }
    nlohmann::ordered_json meta;
    meta["sample_rate_hz"] = w.sample_rate_hz();
    meta["units"] = units;
    meta["seed"] = seed;
    meta["samples"] = w.size();
    meta["encoding"] = "float64-le";
    std::ofstream side(path.string() + ".json");
    if (!side) throw Error(Errc::io_error, "cannot open sidecar for " + path.string());
    side << meta.dump(2) << '\n';
}

Waveform read_waveform(const std::filesystem::path& path) {
    std::ifstream side(path.string() + ".json");
    if (!side) throw Error(Errc::io_error, "missing sidecar for " + path.string());
    const auto meta = nlohmann::json::parse(side);
    const auto count = meta.at("samples").get<std::size_t>();
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw Error(Errc::io_error, "cannot open " + path.string());
    std::vector<double> samples(count);
    for (auto& v : samples) {
        unsigned char bytes[8];
        if (!bin.read(reinterpret_cast<char*>(bytes), 8)) {
            throw Error(Errc::io_error, "truncated waveform " + path.string());
        }
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        v = std::bit_cast<double>(bits);
    }
    return {std::move(samples), meta.at("sample_rate_hz").get<double>()};
}

void write_psd_csv(const std::filesystem::path& path, const SpectrumEstimate& spectrum) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_error, "cannot open " + path.string());
    out.precision(17);
    out << "frequency_hz,psd\n";
    for (std::size_t k = 0; k < spectrum.psd.size(); ++k) {
        out << spectrum.frequencies[k] << ',' << spectrum.psd[k] << '\n';
    }
}

}  // namespace kljn
