#pragma once

// Closed-form circuit algebra of the (generalized) KLJN key exchanger:
// generator solutions, wire noise levels, power flow, resultant resistances,
// cable crossover frequencies, and bit noise-temperatures.

#include <array>
#include <string_view>
#include <utility>

namespace kljn {

/// Boltzmann constant, exact SI value [J/K].
inline constexpr double kBoltzmann = 1.380649e-23;

/// Relative tolerance used for exact analytic identities.
inline constexpr double kIdentityRelTol = 1e-12;
/// Relative tolerance for verifying the generator-voltage constraint solution.
inline constexpr double kConstraintRelTol = 1e-9;

enum class Choice { L, H };

/// Resistor pair connected during one bit period. HL = Alice H, Bob L.
enum class BitState { HH, HL, LH, LL };

inline constexpr std::array<BitState, 4> kAllStates{BitState::HH, BitState::HL, BitState::LH,
                                                    BitState::LL};

constexpr BitState make_state(Choice alice, Choice bob) noexcept {
    if (alice == Choice::H) return bob == Choice::H ? BitState::HH : BitState::HL;
    return bob == Choice::H ? BitState::LH : BitState::LL;
}
constexpr Choice alice_choice(BitState s) noexcept {
    return (s == BitState::HH || s == BitState::HL) ? Choice::H : Choice::L;
}
constexpr Choice bob_choice(BitState s) noexcept {
    return (s == BitState::HH || s == BitState::LH) ? Choice::H : Choice::L;
}
constexpr bool is_secure(BitState s) noexcept { return s == BitState::HL || s == BitState::LH; }

std::string_view to_string(BitState s) noexcept;
std::string_view to_string(Choice c) noexcept;
/// Parses "HH", "HL", "LH" or "LL"; throws Error(invalid_argument) otherwise.
BitState parse_state(std::string_view text);

/// The four resistances of a (VMG-)KLJN instance, all strictly positive [ohm].
class ResistorQuad {
public:
    ResistorQuad(double r_ha, double r_lb, double r_la, double r_hb);

    double r_ha() const noexcept { return r_ha_; }
    double r_lb() const noexcept { return r_lb_; }
    double r_la() const noexcept { return r_la_; }
    double r_hb() const noexcept { return r_hb_; }

    /// Alice's and Bob's connected resistances for a bit state.
    std::pair<double, double> connected(BitState s) const noexcept;

    /// True iff R_LA = R_LB and R_HA = R_HB (relative tolerance 1e-12).
    bool is_classical() const noexcept;

    /// Mirror image: (R_HA <-> R_HB, R_LA <-> R_LB). HL quantities of the
    /// mirror equal LH quantities of the original and vice versa.
    ResistorQuad mirrored() const { return {r_hb_, r_la_, r_lb_, r_ha_}; }

    friend bool operator==(const ResistorQuad&, const ResistorQuad&) = default;

private:
    double r_ha_, r_lb_, r_la_, r_hb_;
};

/// RMS voltages of the four noise generators [V] and their shared bandwidth B [Hz].
class GeneratorSet {
public:
    GeneratorSet(double u_ha, double u_lb, double u_la, double u_hb, double bandwidth_b);

    double u_ha() const noexcept { return u_ha_; }
    double u_lb() const noexcept { return u_lb_; }
    double u_la() const noexcept { return u_la_; }
    double u_hb() const noexcept { return u_hb_; }
    double bandwidth_b() const noexcept { return bandwidth_b_; }

    /// Alice's and Bob's active generator RMS voltages for a bit state.
    std::pair<double, double> connected(BitState s) const noexcept;

    friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;

private:
    double u_ha_, u_lb_, u_la_, u_hb_, bandwidth_b_;
};

/// Lumped cable parasitics derived from per-meter values.
class CableModel {
public:
    CableModel(double length_m, double cap_per_m, double ind_per_m);

    double length_m() const noexcept { return length_m_; }
    double cap_per_m() const noexcept { return cap_per_m_; }
    double ind_per_m() const noexcept { return ind_per_m_; }
    double capacitance() const noexcept { return length_m_ * cap_per_m_; }
    double inductance() const noexcept { return length_m_ * ind_per_m_; }

    /// Multiplies C and L by `factor`, dividing every crossover frequency by it.
    CableModel frequency_scaled(double factor) const;

    friend bool operator==(const CableModel&, const CableModel&) = default;

private:
    double length_m_, cap_per_m_, ind_per_m_;
};

struct Resultants {
    double r_p_hl, r_p_lh, r_s_hl, r_s_lh;
};

struct Temperatures {
    double t_ha, t_lb, t_la, t_hb;
};

struct WireLevels {
    double u_hl, u_lh;  // RMS wire voltage [V]
    double i_hl, i_lh;  // RMS wire current [A]
    double p_hl, p_lh;  // net power Alice -> Bob [W]
};

/// Crossover frequencies [Hz]; +infinity when the corresponding C_c or L_c is zero.
struct CrossoverFrequencies {
    double f_ucr_hl, f_ucr_lh, f_icr_hl, f_icr_lh;
};

struct BitTemperatures {
    double t_u_hl, t_u_lh, t_i_hl, t_i_lh;
};

struct SpectralSummary {
    double s_u0, s_i0;  // zero-frequency PSD of wire voltage / current
    CrossoverFrequencies crossovers;
    BitTemperatures bit_temperatures;
};

/// Wire voltage and current mean squares for one bit state.
struct StateMeanSquares {
    double u2, i2;
};

Resultants resultants(const ResistorQuad& quad) noexcept;

/// Parallel and serial resultant of the resistors connected in `state`.
double parallel_resultant(const ResistorQuad& quad, BitState state) noexcept;
double serial_resultant(const ResistorQuad& quad, BitState state) noexcept;

/// Generator voltages satisfying U_HL = U_LH, I_HL = I_LH and P_HL = P_LH for a
/// freely chosen U_LA. Throws Error(unphysical_quad) when no non-negative
/// solution for the squared voltages exists.
GeneratorSet vmg_solve(const ResistorQuad& quad, double u_la, double bandwidth_b);

/// Squared generator voltages {U_HA², U_LB², U_HB²} from the published
/// closed-form expressions. Used only to cross-check vmg_solve.
std::array<double, 3> vmg_closed_form(const ResistorQuad& quad, double u_la);

/// Residuals of the three secure-state constraints, each relative to its
/// natural scale: {voltage, current, power}.
std::array<double, 3> constraint_residuals(const ResistorQuad& quad, const GeneratorSet& gens);

/// Johnson-Nyquist temperature T = U²/(4 k R B).
double noise_temperature(double u_rms, double resistance, double bandwidth_b) noexcept;
Temperatures temperatures(const ResistorQuad& quad, const GeneratorSet& gens) noexcept;

/// Unfiltered (white within B) wire mean squares via superposition.
StateMeanSquares state_mean_squares(const ResistorQuad& quad, const GeneratorSet& gens,
                                    BitState state) noexcept;
/// Net power flowing from Alice to Bob in `state`.
double state_power(const ResistorQuad& quad, const GeneratorSet& gens, BitState state) noexcept;
WireLevels wire_levels(const ResistorQuad& quad, const GeneratorSet& gens) noexcept;

/// R_LB giving zero power flow: R_LB·R_HA = R_HB·R_LA.
double zero_power_fourth(double r_hb, double r_la, double r_ha);
/// R_HB making the HL and LH parallel resultants equal. Throws Error(infeasible_match).
double match_parallel_fourth(double r_ha, double r_la, double r_lb);
/// R_LB making the HL and LH serial resultants equal. Throws Error(infeasible_match).
double match_serial_fourth(double r_la, double r_hb, double r_ha);

double voltage_crossover(double r_parallel, double capacitance) noexcept;
double current_crossover(double r_serial, double inductance) noexcept;
CrossoverFrequencies crossover_frequencies(const ResistorQuad& quad, const CableModel& cable) noexcept;
/// Voltage and current crossover for any state (including HH / LL).
std::pair<double, double> state_crossovers(const ResistorQuad& quad, const CableModel& cable,
                                           BitState state) noexcept;
/// Throws Error(degenerate_cable) unless `f_cr` is finite; returns it otherwise.
double require_finite_crossover(double f_cr, std::string_view what);

/// Lorentzian S(f) = s0 / (1 + f²/f_cr²).
double lorentzian(double s0, double f_cr, double f) noexcept;
/// Integral of the Lorentzian over [0, b]: s0·f_cr·atan(b/f_cr). An infinite
/// crossover yields the white-noise value s0·b.
double band_limited_ms(double s0, double f_cr, double b) noexcept;

/// Cable-filtered wire mean squares {U_C², I_L²} for one state.
StateMeanSquares filtered_mean_squares(const ResistorQuad& quad, const GeneratorSet& gens,
                                       const CableModel& cable, BitState state) noexcept;

BitTemperatures bit_temperatures(const WireLevels& levels, const ResistorQuad& quad,
                                 double bandwidth_b) noexcept;

SpectralSummary spectral_summary(const ResistorQuad& quad, const GeneratorSet& gens,
                                 const CableModel& cable) noexcept;

/// Every derived quantity of one configuration (one column of a design table).
struct FullReport {
    ResistorQuad quad;
    GeneratorSet gens;
    CableModel cable;
    Resultants res;
    Temperatures temps;
    WireLevels levels;
    BitTemperatures bit_temps;
    CrossoverFrequencies crossovers;
};

FullReport full_report(const ResistorQuad& quad, double u_la, const CableModel& cable,
                       double bandwidth_b);

/// Relative difference |a-b| / max(|a|,|b|); 0 when both are zero, and 0 for
/// two equal infinities.
double relative_difference(double a, double b) noexcept;

}  // namespace kljn
