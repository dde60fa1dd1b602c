#pragma once

// Passive single-point attacks on the wire: crossover-frequency estimation and
// noise-temperature (mean-square) discrimination between the HL and LH
// secure states, plus leak statistics over many trials.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kljn/circuit.hpp"
#include "kljn/errors.hpp"
#include "kljn/noise_sim.hpp"

namespace kljn {

/// Predictions closer than this (relative) are treated as identical.
inline constexpr double kIndistinguishableRelTol = 1e-9;

enum class Channel { voltage, current };
std::string_view to_string(Channel c) noexcept;

struct AttackVerdict {
    BitState guessed_state;   // always HL or LH
    double statistic_value;   // distance of the measurement to the chosen hypothesis
    double decision_margin;   // distance gap between the hypotheses, >= 0
    Channel channel;          // channel that decided
};

/// Default evaluation grid: `count` log-spaced points spanning [B/8, B],
/// clipped to [2Δf, B - 3Δf] for a spectrum with resolution Δf so that the
/// window's main lobe neither reaches DC nor the generator band edge. Δf = 0
/// means an exact (analytic) spectrum.
std::vector<double> default_eval_frequencies(double bandwidth_b, double resolution_hz,
                                             std::size_t count = 8);

/// Crossover estimate f/√(s0/S(f) − 1) averaged over the usable evaluation
/// points. Weights are the inverse delta-method variances under a constant
/// relative PSD error, f⁴/(1 + f²/f̂²)², evaluated on the Lorentzian of a
/// pilot f̂ (a weighted least-squares fit of 1/f_cr² = (s0/S − 1)/f²) so that
/// noise in S never feeds back into its own weight. Points with S(f) >= s0,
/// S(f) <= 0, or outside the spectrum are skipped; throws
/// Error(no_usable_points) if none remain.
double estimate_crossover(const SpectrumEstimate& spectrum, double s0,
                          std::span<const double> eval_freqs);

/// Same estimator over an arbitrary PSD evaluator (used for analytic spectra).
template <class Psd>
double estimate_crossover_fn(Psd&& psd, double s0, std::span<const double> eval_freqs);

struct CrossoverMeasurement {
    std::optional<double> voltage_fcr;
    std::optional<double> current_fcr;
};

/// True iff the channel's HL/LH crossover predictions are finite and differ.
bool crossover_channel_distinguishes(const CrossoverFrequencies& f, Channel c) noexcept;

/// Picks the hypothesis whose predicted crossover is nearer in log-frequency,
/// on each measured and distinguishing channel; the channel with the larger
/// margin decides. Throws Error(indistinguishable_hypotheses) when no such
/// channel exists.
AttackVerdict crossover_attack(const CrossoverMeasurement& measured,
                               const SpectralSummary& predictions);

/// Predicted cable-filtered mean squares for the two secure hypotheses.
struct TemperaturePredictions {
    StateMeanSquares hl;
    StateMeanSquares lh;
};

TemperaturePredictions temperature_predictions(const ResistorQuad& quad, const GeneratorSet& gens,
                                               const CableModel& cable) noexcept;

bool temperature_channel_distinguishes(const TemperaturePredictions& p, Channel c) noexcept;

struct MeanSquareMeasurement {
    std::optional<double> u_c_ms;
    std::optional<double> i_l_ms;
};

/// Minimizes the summed squared relative distance between measured and
/// predicted (U_C², I_L²) over the distinguishing channels. Throws
/// Error(indistinguishable_hypotheses) when no measured channel distinguishes.
AttackVerdict temperature_attack(const MeanSquareMeasurement& measured,
                                 const TemperaturePredictions& predictions);

struct TrialOutcome {
    std::uint64_t seed;
    BitState true_state;
    std::optional<AttackVerdict> verdict;  // empty = withheld
};

/// Guess actually scored for a trial: the verdict, or a fair coin flip drawn
/// from the trial seed when the verdict was withheld.
BitState scored_guess(const TrialOutcome& trial);

struct Interval {
    double lo, hi;
};

/// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct LeakReport {
    std::size_t n_trials = 0;
    std::size_t n_correct = 0;
    double p = 0.0;
    Interval wilson_95{0.0, 1.0};

    /// Combines counts of two disjoint batches.
    static LeakReport from_counts(std::size_t n_correct, std::size_t n_trials);
    LeakReport merged(const LeakReport& other) const {
        return from_counts(n_correct + other.n_correct, n_trials + other.n_trials);
    }
    bool excludes_half() const noexcept { return wilson_95.lo > 0.5 || wilson_95.hi < 0.5; }
};

LeakReport leak_estimate(std::span<const TrialOutcome> trials);

// ---------------------------------------------------------------------------
// Eve's view of one bit period

struct EveOptions {
    std::size_t segment_len = 4096;
    double overlap_fraction = 0.5;
    std::size_t eval_points = 8;
};

/// Requested Welch segment, shrunk to the largest power of two <= n/8 (at
/// least 16) when the waveform is too short to average >= ~15 segments.
std::size_t effective_segment_len(std::size_t requested, std::size_t waveform_len);

struct EveObservation {
    CrossoverMeasurement crossovers;
    MeanSquareMeasurement mean_squares;
};

/// Measurements from simulated wire waveforms: Welch spectra inverted for the
/// crossover of every channel with finite predictions (S(0) known publicly),
/// and the raw mean squares.
EveObservation observe_waveforms(const BitPeriodWaveforms& wave, const SpectralSummary& predictions,
                                 double bandwidth_b, const EveOptions& options = {});

/// Noise-free measurements for `state`: the exact crossovers and cable-filtered
/// mean squares.
EveObservation observe_analytic(const ResistorQuad& quad, const GeneratorSet& gens,
                                const CableModel& cable, BitState state);

/// Both attacks on one observation; an empty optional is a withheld verdict.
struct EveVerdicts {
    std::optional<AttackVerdict> crossover;
    std::optional<AttackVerdict> temperature;
};

EveVerdicts run_attacks(const EveObservation& obs, const SpectralSummary& spectral,
                        const TemperaturePredictions& temps);

// ---------------------------------------------------------------------------

template <class Psd>
double estimate_crossover_fn(Psd&& psd, double s0, std::span<const double> eval_freqs) {
    struct Point {
        double f, r;  // r = s0/S - 1 = f²/f_cr² for an exact Lorentzian
    };
    std::vector<Point> points;
    for (double f : eval_freqs) {
        if (!(f > 0.0)) continue;
        const std::optional<double> s = psd(f);
        if (!s || !(*s > 0.0) || !(*s < s0)) continue;
        points.push_back({f, s0 / *s - 1.0});
    }
    if (points.empty()) {
        throw Error(Errc::no_usable_points, "no evaluation frequency has 0 < S(f) < S(0)");
    }
    // Pilot: r/f² estimates 1/f_cr² with standard deviation ∝ (1 + r)/f².
    double num = 0.0, den = 0.0;
    for (const auto& p : points) {
        const double w = std::pow(p.f * p.f / (1.0 + p.r), 2);
        num += w * p.r / (p.f * p.f);
        den += w;
    }
    const double pilot_inv_sq = num / den;

    num = den = 0.0;
    for (const auto& p : points) {
        const double x = p.f * p.f * pilot_inv_sq;  // f²/f̂²
        const double w = std::pow(p.f * p.f / (1.0 + x), 2);
        num += w * p.f / std::sqrt(p.r);
        den += w;
    }
    return num / den;
}

}  // namespace kljn
