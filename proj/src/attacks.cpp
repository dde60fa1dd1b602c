#include "kljn/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "kljn/rng.hpp"

namespace kljn {

namespace {

// Stream index reserved for the coin flip of a withheld verdict.
constexpr std::uint64_t kCoinStream = 0xC011F11Bu;

bool distinct(double a, double b) noexcept {
    return std::isfinite(a) && std::isfinite(b) && relative_difference(a, b) > kIndistinguishableRelTol;
}

struct ChannelDecision {
    BitState guess;
    double statistic;
    double margin;
    Channel channel;
};

}  // namespace

std::string_view to_string(Channel c) noexcept { return c == Channel::voltage ? "voltage" : "current"; }

std::vector<double> default_eval_frequencies(double bandwidth_b, double resolution_hz,
                                             std::size_t count) {
    double lo = bandwidth_b / 8.0;
    double hi = bandwidth_b;
    if (resolution_hz > 0.0) {
        lo = std::max(lo, 2.0 * resolution_hz);
        hi = std::min(hi, bandwidth_b - 3.0 * resolution_hz);
    }
    std::vector<double> out;
    if (count == 0 || !(hi > 0.0) || !(lo > 0.0) || lo > hi) return out;
    if (count == 1) return {std::sqrt(lo * hi)};
    out.reserve(count);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1)));
    }
    return out;
}

double estimate_crossover(const SpectrumEstimate& spectrum, double s0,
                          std::span<const double> eval_freqs) {
    if (!(s0 > 0.0)) throw Error(Errc::invalid_argument, "S(0) must be > 0");
    const double top = spectrum.frequencies.empty() ? 0.0 : spectrum.frequencies.back();
    return estimate_crossover_fn(
        [&](double f) -> std::optional<double> {
            if (f > top) return std::nullopt;
            return spectrum.value_at(f);
        },
        s0, eval_freqs);
}

bool crossover_channel_distinguishes(const CrossoverFrequencies& f, Channel c) noexcept {
    return c == Channel::voltage ? distinct(f.f_ucr_hl, f.f_ucr_lh) : distinct(f.f_icr_hl, f.f_icr_lh);
}

AttackVerdict crossover_attack(const CrossoverMeasurement& measured,
                               const SpectralSummary& predictions) {
    const auto& f = predictions.crossovers;
    std::optional<ChannelDecision> best;
    auto consider = [&](Channel c, const std::optional<double>& estimate, double f_hl, double f_lh) {
        if (!estimate || !(*estimate > 0.0) || !crossover_channel_distinguishes(f, c)) return;
        const double d_hl = std::abs(std::log(*estimate / f_hl));
        const double d_lh = std::abs(std::log(*estimate / f_lh));
        const ChannelDecision d{d_hl <= d_lh ? BitState::HL : BitState::LH, std::min(d_hl, d_lh),
                                std::abs(d_hl - d_lh), c};
        if (!best || d.margin > best->margin) best = d;
    };
    consider(Channel::voltage, measured.voltage_fcr, f.f_ucr_hl, f.f_ucr_lh);
    consider(Channel::current, measured.current_fcr, f.f_icr_hl, f.f_icr_lh);
    if (!best) {
        throw Error(Errc::indistinguishable_hypotheses,
                    "HL and LH crossover predictions coincide on every measured channel");
    }
    return {best->guess, best->statistic, best->margin, best->channel};
}

TemperaturePredictions temperature_predictions(const ResistorQuad& quad, const GeneratorSet& gens,
                                               const CableModel& cable) noexcept {
    return {filtered_mean_squares(quad, gens, cable, BitState::HL),
            filtered_mean_squares(quad, gens, cable, BitState::LH)};
}

bool temperature_channel_distinguishes(const TemperaturePredictions& p, Channel c) noexcept {
    return c == Channel::voltage ? distinct(p.hl.u2, p.lh.u2) : distinct(p.hl.i2, p.lh.i2);
}

AttackVerdict temperature_attack(const MeanSquareMeasurement& measured,
                                 const TemperaturePredictions& predictions) {
    double d_hl = 0.0, d_lh = 0.0;
    bool any = false;
    // The decisive channel is the one contributing the larger distance gap.
    Channel decisive = Channel::voltage;
    double decisive_gap = -1.0;
    auto add = [&](Channel c, const std::optional<double>& m, double p_hl, double p_lh) {
        if (!m || !temperature_channel_distinguishes(predictions, c)) return;
        const double e_hl = (*m - p_hl) / p_hl;
        const double e_lh = (*m - p_lh) / p_lh;
        d_hl += e_hl * e_hl;
        d_lh += e_lh * e_lh;
        const double gap = std::abs(e_hl * e_hl - e_lh * e_lh);
        if (gap > decisive_gap) {
            decisive_gap = gap;
            decisive = c;
        }
        any = true;
    };
    add(Channel::voltage, measured.u_c_ms, predictions.hl.u2, predictions.lh.u2);
    add(Channel::current, measured.i_l_ms, predictions.hl.i2, predictions.lh.i2);
    if (!any) {
        throw Error(Errc::indistinguishable_hypotheses,
                    "HL and LH mean-square predictions coincide on every measured channel");
    }
    return {d_hl <= d_lh ? BitState::HL : BitState::LH, std::min(d_hl, d_lh), std::abs(d_hl - d_lh),
            decisive};
}

BitState scored_guess(const TrialOutcome& trial) {
    if (trial.verdict) return trial.verdict->guessed_state;
    Rng rng(derive_seed(trial.seed, kCoinStream));
    return rng.coin() ? BitState::HL : BitState::LH;
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::clamp(std::min(center - half, p), 0.0, 1.0),
            std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

LeakReport LeakReport::from_counts(std::size_t n_correct, std::size_t n_trials) {
    LeakReport r;
    r.n_trials = n_trials;
    r.n_correct = n_correct;
    r.p = n_trials ? static_cast<double>(n_correct) / static_cast<double>(n_trials) : 0.0;
    r.wilson_95 = wilson_interval(n_correct, n_trials);
    return r;
}

LeakReport leak_estimate(std::span<const TrialOutcome> trials) {
    if (trials.empty()) throw Error(Errc::invalid_argument, "leak estimate needs >= 1 trial");
    std::size_t correct = 0;
    for (const auto& t : trials) {
        if (scored_guess(t) == t.true_state) ++correct;
    }
    return LeakReport::from_counts(correct, trials.size());
}

// ---------------------------------------------------------------------------
// Eve's view of one bit period

std::size_t effective_segment_len(std::size_t requested, std::size_t waveform_len) {
    const std::size_t cap = waveform_len / 8;
    if (requested <= cap) return requested;
    std::size_t pow2 = 16;
    while (pow2 * 2 <= cap) pow2 *= 2;
    return std::min(pow2, waveform_len);
}

EveObservation observe_waveforms(const BitPeriodWaveforms& wave, const SpectralSummary& predictions,
                                 double bandwidth_b, const EveOptions& options) {
    EveObservation obs;
    obs.mean_squares.u_c_ms = mean_square(wave.wire_voltage);
    obs.mean_squares.i_l_ms = mean_square(wave.wire_current);

    const auto& f = predictions.crossovers;
    auto estimate = [&](const Waveform& w, double s0, double f_hl, double f_lh) -> std::optional<double> {
        if (!std::isfinite(f_hl) || !std::isfinite(f_lh)) return std::nullopt;
        const std::size_t seg = effective_segment_len(options.segment_len, w.size());
        const auto spectrum = welch_psd(w, seg, options.overlap_fraction);
        const auto freqs = default_eval_frequencies(bandwidth_b, spectrum.resolution_hz, options.eval_points);
        try {
            return estimate_crossover(spectrum, s0, freqs);
        } catch (const Error& e) {
            if (e.code() == Errc::no_usable_points) return std::nullopt;
            throw;
        }
    };
    obs.crossovers.voltage_fcr = estimate(wave.wire_voltage, predictions.s_u0, f.f_ucr_hl, f.f_ucr_lh);
    obs.crossovers.current_fcr = estimate(wave.wire_current, predictions.s_i0, f.f_icr_hl, f.f_icr_lh);
    return obs;
}

EveObservation observe_analytic(const ResistorQuad& quad, const GeneratorSet& gens,
                                const CableModel& cable, BitState state) {
    EveObservation obs;
    const auto [fu, fi] = state_crossovers(quad, cable, state);
    if (std::isfinite(fu)) obs.crossovers.voltage_fcr = fu;
    if (std::isfinite(fi)) obs.crossovers.current_fcr = fi;
    const auto ms = filtered_mean_squares(quad, gens, cable, state);
    obs.mean_squares.u_c_ms = ms.u2;
    obs.mean_squares.i_l_ms = ms.i2;
    return obs;
}

EveVerdicts run_attacks(const EveObservation& obs, const SpectralSummary& spectral,
                        const TemperaturePredictions& temps) {
    EveVerdicts v;
    try {
        v.crossover = crossover_attack(obs.crossovers, spectral);
    } catch (const Error& e) {
        if (e.code() != Errc::indistinguishable_hypotheses) throw;
    }
    try {
        v.temperature = temperature_attack(obs.mean_squares, temps);
    } catch (const Error& e) {
        if (e.code() != Errc::indistinguishable_hypotheses) throw;
    }
    return v;
}

}  // namespace kljn
