#pragma once

// Key-exchange sessions: per-period random resistor choices, decoding of the
// peer's choice from the wire noise level, key assembly, and ground truth for
// the eavesdropper harness.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kljn/attacks.hpp"
#include "kljn/circuit.hpp"
#include "kljn/noise_sim.hpp"

namespace kljn {

enum class Party { alice, bob };

enum class SessionMode { analytic, monte_carlo };
std::string_view to_string(SessionMode m) noexcept;
SessionMode parse_session_mode(std::string_view text);

/// Expected wire mean-square voltage per bit state, with the standard error
/// of a mean-square measurement over one bit period (0 in analytic mode).
struct LevelTable {
    std::array<double, 4> u2{};        // indexed by BitState
    std::array<double, 4> std_error{};

    double level(BitState s) const noexcept { return u2[static_cast<int>(s)]; }
    double error(BitState s) const noexcept { return std_error[static_cast<int>(s)]; }
};

/// Levels including cable filtering. With duration_s > 0, each standard error
/// is level/√(B·T), the spread of a mean square over B·T independent samples.
LevelTable level_table(const ResistorQuad& quad, const GeneratorSet& gens, const CableModel& cable,
                       double duration_s = 0.0);

/// Throws Error(ambiguous_levels) if, for either party and either own choice,
/// the two candidate levels lie closer than 3x their larger standard error.
void check_level_separation(const LevelTable& table);

/// Nearest-level classification among the two states consistent with the
/// party's own choice; returns the implied peer choice.
Choice decode_state(Party party, Choice own, double measured_u_ms, const LevelTable& table);

struct SessionConfig {
    ResistorQuad quad{9000, 1000, 1000, 9000};
    std::optional<GeneratorSet> gens;  // solved from u_la when empty
    double u_la = 1.0;
    CableModel cable{2000, 100e-12, 0.0};
    double bandwidth_b = 1000.0;
    double duration_s = 0.1;        // one bit period
    double sample_rate_hz = 0.0;    // 0 = minimum admissible rate
    std::size_t n_bit_periods = 100;
    std::uint64_t master_seed = 1;
    BitState one_state = BitState::HL;  // secure state encoding bit 1
    SessionMode mode = SessionMode::analytic;
    bool eve_enabled = false;
    EveOptions eve;
    std::vector<BitState> forced_states;  // overrides the random draws when non-empty
    unsigned threads = 1;
};

struct PeriodRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    BitState true_state = BitState::LL;
    double measured_u_ms = 0.0;
    Choice alice_decoded_peer = Choice::L;
    Choice bob_decoded_peer = Choice::L;
    bool secure = false;
    std::optional<int> alice_bit;
    std::optional<int> bob_bit;
    std::optional<EveObservation> eve_observation;
    std::optional<EveVerdicts> eve;
};

struct SessionRecord {
    SessionConfig config;
    GeneratorSet gens;
    double sample_rate_hz = 0.0;  // 0 in analytic mode
    LevelTable levels;
    std::vector<PeriodRecord> periods;
    std::vector<int> alice_key;
    std::vector<int> bob_key;
    std::size_t discard_count = 0;   // HH / LL periods
    std::size_t decode_errors = 0;   // party decodings disagreeing with ground truth
    std::optional<LeakReport> crossover_leak;
    std::optional<LeakReport> temperature_leak;

    bool keys_agree() const noexcept { return alice_key == bob_key; }
};

SessionRecord run_session(const SessionConfig& cfg);

/// Packs bits MSB-first into bytes (zero-padded) and hex-encodes them.
std::string key_hex(const std::vector<int>& bits);

}  // namespace kljn
