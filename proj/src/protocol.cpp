#include "kljn/protocol.hpp"

#include <cmath>
#include <cstdio>

#include "kljn/errors.hpp"
#include "kljn/parallel.hpp"
#include "kljn/rng.hpp"

namespace kljn {

namespace {

constexpr std::uint64_t kWaveformStream = 7;

struct Candidates {
    BitState peer_l, peer_h;
};

Candidates candidates(Party party, Choice own) noexcept {
    if (party == Party::alice) {
        return own == Choice::L ? Candidates{BitState::LL, BitState::LH}
                                : Candidates{BitState::HL, BitState::HH};
    }
    return own == Choice::L ? Candidates{BitState::LL, BitState::HL}
                            : Candidates{BitState::LH, BitState::HH};
}

void require_separated(const LevelTable& t, Candidates c) {
    const double gap = std::abs(t.level(c.peer_l) - t.level(c.peer_h));
    const double se = std::max(t.error(c.peer_l), t.error(c.peer_h));
    if (!(gap > 3.0 * se)) {
        throw Error(Errc::ambiguous_levels,
                    std::string(to_string(c.peer_l)) + "/" + std::string(to_string(c.peer_h)) +
                        " levels differ by " + std::to_string(gap) + " V^2, below 3 x " +
                        std::to_string(se) + " V^2 standard error; lengthen the bit period");
    }
}

}  // namespace

std::string_view to_string(SessionMode m) noexcept {
    return m == SessionMode::analytic ? "analytic" : "monte_carlo";
}

SessionMode parse_session_mode(std::string_view text) {
    if (text == "analytic") return SessionMode::analytic;
    if (text == "monte_carlo" || text == "monte-carlo") return SessionMode::monte_carlo;
    throw Error(Errc::invalid_argument, "unknown session mode '" + std::string(text) + "'");
}

LevelTable level_table(const ResistorQuad& quad, const GeneratorSet& gens, const CableModel& cable,
                       double duration_s) {
    LevelTable t;
    const double dof = duration_s > 0.0 ? gens.bandwidth_b() * duration_s : 0.0;
    for (BitState s : kAllStates) {
        const int i = static_cast<int>(s);
        t.u2[i] = filtered_mean_squares(quad, gens, cable, s).u2;
        t.std_error[i] = dof > 0.0 ? t.u2[i] / std::sqrt(dof) : 0.0;
    }
    return t;
}

void check_level_separation(const LevelTable& table) {
    for (Party p : {Party::alice, Party::bob}) {
        for (Choice own : {Choice::L, Choice::H}) require_separated(table, candidates(p, own));
    }
}

Choice decode_state(Party party, Choice own, double measured_u_ms, const LevelTable& table) {
    const Candidates c = candidates(party, own);
    require_separated(table, c);
    const double d_l = std::abs(measured_u_ms - table.level(c.peer_l));
    const double d_h = std::abs(measured_u_ms - table.level(c.peer_h));
    return d_l <= d_h ? Choice::L : Choice::H;
}

SessionRecord run_session(const SessionConfig& cfg) {
    if (cfg.n_bit_periods < 1) throw Error(Errc::invalid_argument, "n_bit_periods must be >= 1");
    if (cfg.one_state != BitState::HL && cfg.one_state != BitState::LH) {
        throw Error(Errc::invalid_argument, "bit convention must name HL or LH");
    }
    if (!cfg.forced_states.empty() && cfg.forced_states.size() != cfg.n_bit_periods) {
        throw Error(Errc::invalid_argument, "forced_states must list one state per period");
    }

    const GeneratorSet gens = cfg.gens ? *cfg.gens : vmg_solve(cfg.quad, cfg.u_la, cfg.bandwidth_b);
    const bool monte_carlo = cfg.mode == SessionMode::monte_carlo;

    SessionRecord rec{cfg, gens, 0.0, level_table(cfg.quad, gens, cfg.cable, monte_carlo ? cfg.duration_s : 0.0),
                      {}, {}, {}, 0, 0, std::nullopt, std::nullopt};
    check_level_separation(rec.levels);

    std::optional<SimulationGrid> grid;
    if (monte_carlo) {
        const double fs = cfg.sample_rate_hz > 0.0
                              ? cfg.sample_rate_hz
                              : minimum_sample_rate(cfg.quad, cfg.cable, gens.bandwidth_b(), kAllStates);
        grid.emplace(fs, cfg.duration_s);
        grid->require_resolves(gens.bandwidth_b(), max_finite_crossover(cfg.quad, cfg.cable, kAllStates));
        rec.sample_rate_hz = fs;
    }

    const SpectralSummary spectral = spectral_summary(cfg.quad, gens, cfg.cable);
    const TemperaturePredictions temps = temperature_predictions(cfg.quad, gens, cfg.cable);

    rec.periods.resize(cfg.n_bit_periods);
    parallel_for(cfg.n_bit_periods, cfg.threads, [&](std::size_t i) {
        PeriodRecord& p = rec.periods[i];
        p.index = i;
        p.seed = derive_seed(cfg.master_seed, i);
        Rng rng(p.seed);
        const Choice a = rng.coin() ? Choice::H : Choice::L;
        const Choice b = rng.coin() ? Choice::H : Choice::L;
        p.true_state = cfg.forced_states.empty() ? make_state(a, b) : cfg.forced_states[i];
        p.secure = is_secure(p.true_state);

        std::optional<BitPeriodWaveforms> wave;
        if (monte_carlo) {
            wave.emplace(simulate_bit_period(p.true_state, cfg.quad, gens, cfg.cable, *grid,
                                             derive_seed(p.seed, kWaveformStream)));
            p.measured_u_ms = mean_square(wave->wire_voltage);
        } else {
            p.measured_u_ms = rec.levels.level(p.true_state);
        }

        const Choice alice_own = alice_choice(p.true_state);
        const Choice bob_own = bob_choice(p.true_state);
        p.alice_decoded_peer = decode_state(Party::alice, alice_own, p.measured_u_ms, rec.levels);
        p.bob_decoded_peer = decode_state(Party::bob, bob_own, p.measured_u_ms, rec.levels);

        const BitState alice_view = make_state(alice_own, p.alice_decoded_peer);
        const BitState bob_view = make_state(p.bob_decoded_peer, bob_own);
        if (is_secure(alice_view)) p.alice_bit = alice_view == cfg.one_state ? 1 : 0;
        if (is_secure(bob_view)) p.bob_bit = bob_view == cfg.one_state ? 1 : 0;

        if (cfg.eve_enabled && p.secure) {
            p.eve_observation = monte_carlo
                                    ? observe_waveforms(*wave, spectral, gens.bandwidth_b(), cfg.eve)
                                    : observe_analytic(cfg.quad, gens, cfg.cable, p.true_state);
            p.eve = run_attacks(*p.eve_observation, spectral, temps);
        }
    });

    std::vector<TrialOutcome> crossover_trials, temperature_trials;
    for (const auto& p : rec.periods) {
        if (!p.secure) ++rec.discard_count;
        if (p.alice_decoded_peer != bob_choice(p.true_state)) ++rec.decode_errors;
        if (p.bob_decoded_peer != alice_choice(p.true_state)) ++rec.decode_errors;
        if (p.alice_bit) rec.alice_key.push_back(*p.alice_bit);
        if (p.bob_bit) rec.bob_key.push_back(*p.bob_bit);
        if (p.eve) {
            crossover_trials.push_back({p.seed, p.true_state, p.eve->crossover});
            temperature_trials.push_back({p.seed, p.true_state, p.eve->temperature});
        }
    }
    if (!crossover_trials.empty()) {
        rec.crossover_leak = leak_estimate(crossover_trials);
        rec.temperature_leak = leak_estimate(temperature_trials);
    }
    return rec;
}

std::string key_hex(const std::vector<int>& bits) {
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 8) {
        unsigned byte = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            byte <<= 1;
            if (i + j < bits.size() && bits[i + j] != 0) byte |= 1u;
        }
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", byte);
        out += buf;
    }
    return out;
}

}  // namespace kljn
