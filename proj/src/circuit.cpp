#include "kljn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kljn/errors.hpp"

namespace kljn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(Errc::invalid_argument,
                    std::string(name) + " must be finite and > 0, got " + std::to_string(value));
    }
}

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(Errc::invalid_argument,
                    std::string(name) + " must be finite and >= 0, got " + std::to_string(value));
    }
}

double parallel(double a, double b) noexcept { return a * b / (a + b); }

}  // namespace

std::string_view to_string(BitState s) noexcept {
    switch (s) {
        case BitState::HH: return "HH";
        case BitState::HL: return "HL";
        case BitState::LH: return "LH";
        case BitState::LL: return "LL";
    }
    return "??";
}

std::string_view to_string(Choice c) noexcept { return c == Choice::H ? "H" : "L"; }

BitState parse_state(std::string_view text) {
    for (BitState s : kAllStates) {
        if (to_string(s) == text) return s;
    }
    throw Error(Errc::invalid_argument, "unknown bit state '" + std::string(text) + "'");
}

double relative_difference(double a, double b) noexcept {
    if (a == b) return 0.0;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) / scale;
}

// ---------------------------------------------------------------------------
// Domain types

ResistorQuad::ResistorQuad(double r_ha, double r_lb, double r_la, double r_hb)
    : r_ha_(r_ha), r_lb_(r_lb), r_la_(r_la), r_hb_(r_hb) {
    require_positive(r_ha, "R_HA");
    require_positive(r_lb, "R_LB");
    require_positive(r_la, "R_LA");
    require_positive(r_hb, "R_HB");
}

std::pair<double, double> ResistorQuad::connected(BitState s) const noexcept {
    const double ra = alice_choice(s) == Choice::H ? r_ha_ : r_la_;
    const double rb = bob_choice(s) == Choice::H ? r_hb_ : r_lb_;
    return {ra, rb};
}

bool ResistorQuad::is_classical() const noexcept {
    return relative_difference(r_la_, r_lb_) <= kIdentityRelTol &&
           relative_difference(r_ha_, r_hb_) <= kIdentityRelTol;
}

GeneratorSet::GeneratorSet(double u_ha, double u_lb, double u_la, double u_hb, double bandwidth_b)
    : u_ha_(u_ha), u_lb_(u_lb), u_la_(u_la), u_hb_(u_hb), bandwidth_b_(bandwidth_b) {
    require_non_negative(u_ha, "U_HA");
    require_non_negative(u_lb, "U_LB");
    require_non_negative(u_la, "U_LA");
    require_non_negative(u_hb, "U_HB");
    require_positive(bandwidth_b, "bandwidth B");
}

std::pair<double, double> GeneratorSet::connected(BitState s) const noexcept {
    const double ua = alice_choice(s) == Choice::H ? u_ha_ : u_la_;
    const double ub = bob_choice(s) == Choice::H ? u_hb_ : u_lb_;
    return {ua, ub};
}

CableModel::CableModel(double length_m, double cap_per_m, double ind_per_m)
    : length_m_(length_m), cap_per_m_(cap_per_m), ind_per_m_(ind_per_m) {
    require_positive(length_m, "cable length");
    require_non_negative(cap_per_m, "cable capacitance per meter");
    require_non_negative(ind_per_m, "cable inductance per meter");
}

CableModel CableModel::frequency_scaled(double factor) const {
    require_positive(factor, "frequency scale factor");
    return {length_m_, cap_per_m_ * factor, ind_per_m_ * factor};
}

// ---------------------------------------------------------------------------
// Resultants

Resultants resultants(const ResistorQuad& q) noexcept {
    return {parallel(q.r_ha(), q.r_lb()), parallel(q.r_la(), q.r_hb()), q.r_ha() + q.r_lb(),
            q.r_la() + q.r_hb()};
}

double parallel_resultant(const ResistorQuad& quad, BitState state) noexcept {
    const auto [ra, rb] = quad.connected(state);
    return parallel(ra, rb);
}

double serial_resultant(const ResistorQuad& quad, BitState state) noexcept {
    const auto [ra, rb] = quad.connected(state);
    return ra + rb;
}

// ---------------------------------------------------------------------------
// Generator solution

std::array<double, 3> vmg_closed_form(const ResistorQuad& q, double u_la) {
    const double ha = q.r_ha(), lb = q.r_lb(), la = q.r_la(), hb = q.r_hb();
    const double a = u_la * u_la;
    const double u_hb2 = a * (lb * (ha + hb) - ha * hb - hb * hb) /
                         (la * la + lb * (la - ha) - ha * la);
    const double u_ha2 = a * (lb * (ha + hb) + ha * hb + ha * ha) /
                         (la * la + lb * (la + hb) + hb * la);
    const double u_lb2 = a * (lb * (ha - hb) - ha * hb + lb * lb) /
                         (la * la + la * (hb - ha) - ha * hb);
    return {u_ha2, u_lb2, u_hb2};
}

namespace {

using Mat3 = std::array<std::array<long double, 3>, 3>;
using Vec3 = std::array<long double, 3>;

// Gaussian elimination with partial pivoting. Returns false for a singular matrix.
bool solve3(Mat3 m, Vec3 rhs, Vec3& out) {
    long double scale = 0.0L;
    for (const auto& row : m)
        for (long double v : row) scale = std::max(scale, std::abs(v));
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (std::abs(m[pivot][col]) <= 1e-15L * scale) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const long double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        long double acc = rhs[r];
        for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * out[c];
        out[r] = acc / m[r][r];
    }
    return true;
}

Vec3 residual(const Mat3& m, const Vec3& x, const Vec3& rhs) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) {
        long double acc = rhs[i];
        for (int j = 0; j < 3; ++j) acc -= m[i][j] * x[j];
        r[i] = acc;
    }
    return r;
}

}  // namespace

GeneratorSet vmg_solve(const ResistorQuad& q, double u_la, double bandwidth_b) {
    require_positive(u_la, "U_LA");
    require_positive(bandwidth_b, "bandwidth B");

    // Unknowns (U_HA², U_LB², U_HB²) in units of U_LA²; resistances in units of R_LA.
    // With denominators cleared the three constraints are linear:
    //   D2(lb²x + ha²y) - D1·la²·z = D1·hb²      (voltage)
    //   D2(x + y)       - D1·z     = D1          (current)
    //   D2(lb·x - ha·y) + D1·la·z  = D1·hb       (power)
    const long double r0 = q.r_la();
    const long double ha = q.r_ha() / r0, lb = q.r_lb() / r0, la = 1.0L, hb = q.r_hb() / r0;
    const long double d1 = (ha + lb) * (ha + lb);
    const long double d2 = (la + hb) * (la + hb);

    const Mat3 m{{{d2 * lb * lb, d2 * ha * ha, -d1 * la * la},
                  {d2, d2, -d1},
                  {d2 * lb, -d2 * ha, d1 * la}}};
    const Vec3 rhs{d1 * hb * hb, d1, d1 * hb};

    Vec3 x{};
    if (!solve3(m, rhs, x)) {
        throw Error(Errc::unphysical_quad, "secure-state constraint system is singular");
    }
    Vec3 dx{};
    if (solve3(m, residual(m, x, rhs), dx)) {
        for (int i = 0; i < 3; ++i) x[i] += dx[i];
    }

    std::array<double, 3> sq{};
    for (int i = 0; i < 3; ++i) {
        double v = static_cast<double>(x[i]);
        if (!std::isfinite(v)) throw Error(Errc::unphysical_quad, "non-finite generator solution");
        if (std::abs(v) <= 1e-12) v = 0.0;  // roundoff around an exact zero
        if (v < 0.0) {
            static constexpr const char* names[] = {"U_HA^2", "U_LB^2", "U_HB^2"};
            throw Error(Errc::unphysical_quad,
                        std::string(names[i]) + " would be negative (" + std::to_string(v) +
                            " x U_LA^2)");
        }
        sq[i] = v * u_la * u_la;
    }

    GeneratorSet gens(std::sqrt(sq[0]), std::sqrt(sq[1]), u_la, std::sqrt(sq[2]), bandwidth_b);
    const auto res = constraint_residuals(q, gens);
    for (double r : res) {
        if (!(r <= kConstraintRelTol)) {
            throw Error(Errc::unphysical_quad,
                        "generator solution fails constraint verification (residual " +
                            std::to_string(r) + ")");
        }
    }
    return gens;
}

std::array<double, 3> constraint_residuals(const ResistorQuad& quad, const GeneratorSet& gens) {
    const auto hl = state_mean_squares(quad, gens, BitState::HL);
    const auto lh = state_mean_squares(quad, gens, BitState::LH);
    const double p_hl = state_power(quad, gens, BitState::HL);
    const double p_lh = state_power(quad, gens, BitState::LH);
    const double p_scale = std::max({std::abs(p_hl), std::abs(p_lh),
                                     std::sqrt(std::max(hl.u2, lh.u2) * std::max(hl.i2, lh.i2))});
    const double dp = p_scale > 0.0 ? std::abs(p_hl - p_lh) / p_scale : 0.0;
    return {relative_difference(hl.u2, lh.u2), relative_difference(hl.i2, lh.i2), dp};
}

// ---------------------------------------------------------------------------
// Temperatures, levels, power

double noise_temperature(double u_rms, double resistance, double bandwidth_b) noexcept {
    return u_rms * u_rms / (4.0 * kBoltzmann * resistance * bandwidth_b);
}

Temperatures temperatures(const ResistorQuad& q, const GeneratorSet& g) noexcept {
    const double b = g.bandwidth_b();
    return {noise_temperature(g.u_ha(), q.r_ha(), b), noise_temperature(g.u_lb(), q.r_lb(), b),
            noise_temperature(g.u_la(), q.r_la(), b), noise_temperature(g.u_hb(), q.r_hb(), b)};
}

StateMeanSquares state_mean_squares(const ResistorQuad& quad, const GeneratorSet& gens,
                                    BitState state) noexcept {
    const auto [ra, rb] = quad.connected(state);
    const auto [ua, ub] = gens.connected(state);
    const double ua2 = ua * ua, ub2 = ub * ub;
    const double rs2 = (ra + rb) * (ra + rb);
    return {(ua2 * rb * rb + ub2 * ra * ra) / rs2, (ua2 + ub2) / rs2};
}

double state_power(const ResistorQuad& quad, const GeneratorSet& gens, BitState state) noexcept {
    const auto [ra, rb] = quad.connected(state);
    const auto [ua, ub] = gens.connected(state);
    return (rb * ua * ua - ra * ub * ub) / ((ra + rb) * (ra + rb));
}

WireLevels wire_levels(const ResistorQuad& quad, const GeneratorSet& gens) noexcept {
    const auto hl = state_mean_squares(quad, gens, BitState::HL);
    const auto lh = state_mean_squares(quad, gens, BitState::LH);
    return {std::sqrt(hl.u2),
            std::sqrt(lh.u2),
            std::sqrt(hl.i2),
            std::sqrt(lh.i2),
            state_power(quad, gens, BitState::HL),
            state_power(quad, gens, BitState::LH)};
}

// ---------------------------------------------------------------------------
// Fourth-resistor design

double zero_power_fourth(double r_hb, double r_la, double r_ha) {
    require_positive(r_hb, "R_HB");
    require_positive(r_la, "R_LA");
    require_positive(r_ha, "R_HA");
    return r_hb * r_la / r_ha;
}

double match_parallel_fourth(double r_ha, double r_la, double r_lb) {
    require_positive(r_ha, "R_HA");
    require_positive(r_la, "R_LA");
    require_positive(r_lb, "R_LB");
    const double denom = r_ha * r_la - r_ha * r_lb + r_la * r_lb;
    if (!(denom > 0.0)) {
        throw Error(Errc::infeasible_match,
                    "no positive R_HB equalizes the parallel resultants (requires R_LA > R_pLH)");
    }
    return r_ha * r_la * r_lb / denom;
}

double match_serial_fourth(double r_la, double r_hb, double r_ha) {
    require_positive(r_la, "R_LA");
    require_positive(r_hb, "R_HB");
    require_positive(r_ha, "R_HA");
    if (!(r_la + r_hb > r_ha)) {
        throw Error(Errc::infeasible_match,
                    "no positive R_LB equalizes the serial resultants (requires R_LA + R_HB > R_HA)");
    }
    return r_la + r_hb - r_ha;
}

// ---------------------------------------------------------------------------
// Spectra

double voltage_crossover(double r_parallel, double capacitance) noexcept {
    if (capacitance <= 0.0) return kInf;
    return 1.0 / (2.0 * std::numbers::pi * r_parallel * capacitance);
}

double current_crossover(double r_serial, double inductance) noexcept {
    if (inductance <= 0.0) return kInf;
    return r_serial / (2.0 * std::numbers::pi * inductance);
}

CrossoverFrequencies crossover_frequencies(const ResistorQuad& quad,
                                           const CableModel& cable) noexcept {
    const auto r = resultants(quad);
    const double c = cable.capacitance(), l = cable.inductance();
    return {voltage_crossover(r.r_p_hl, c), voltage_crossover(r.r_p_lh, c),
            current_crossover(r.r_s_hl, l), current_crossover(r.r_s_lh, l)};
}

std::pair<double, double> state_crossovers(const ResistorQuad& quad, const CableModel& cable,
                                           BitState state) noexcept {
    return {voltage_crossover(parallel_resultant(quad, state), cable.capacitance()),
            current_crossover(serial_resultant(quad, state), cable.inductance())};
}

double require_finite_crossover(double f_cr, std::string_view what) {
    if (!std::isfinite(f_cr)) {
        throw Error(Errc::degenerate_cable,
                    std::string(what) + " crossover is infinite (zero cable C or L)");
    }
    return f_cr;
}

double lorentzian(double s0, double f_cr, double f) noexcept {
    const double x = f / f_cr;
    return s0 / (1.0 + x * x);
}

double band_limited_ms(double s0, double f_cr, double b) noexcept {
    if (b <= 0.0) return 0.0;
    if (std::isinf(f_cr)) return s0 * b;
    return s0 * f_cr * std::atan(b / f_cr);
}

StateMeanSquares filtered_mean_squares(const ResistorQuad& quad, const GeneratorSet& gens,
                                       const CableModel& cable, BitState state) noexcept {
    const double b = gens.bandwidth_b();
    const auto white = state_mean_squares(quad, gens, state);
    const auto [fu, fi] = state_crossovers(quad, cable, state);
    return {band_limited_ms(white.u2 / b, fu, b), band_limited_ms(white.i2 / b, fi, b)};
}

BitTemperatures bit_temperatures(const WireLevels& lv, const ResistorQuad& quad,
                                 double bandwidth_b) noexcept {
    const auto r = resultants(quad);
    const double kb4 = 4.0 * kBoltzmann * bandwidth_b;
    return {lv.u_hl * lv.u_hl / (kb4 * r.r_p_hl), lv.u_lh * lv.u_lh / (kb4 * r.r_p_lh),
            lv.i_hl * lv.i_hl * r.r_s_hl / kb4, lv.i_lh * lv.i_lh * r.r_s_lh / kb4};
}

SpectralSummary spectral_summary(const ResistorQuad& quad, const GeneratorSet& gens,
                                 const CableModel& cable) noexcept {
    const double b = gens.bandwidth_b();
    const auto lv = wire_levels(quad, gens);
    // U_HL = U_LH and I_HL = I_LH for solved generators; the HL value is used.
    return {lv.u_hl * lv.u_hl / b, lv.i_hl * lv.i_hl / b, crossover_frequencies(quad, cable),
            bit_temperatures(lv, quad, b)};
}

FullReport full_report(const ResistorQuad& quad, double u_la, const CableModel& cable,
                       double bandwidth_b) {
    const GeneratorSet gens = vmg_solve(quad, u_la, bandwidth_b);
    const auto lv = wire_levels(quad, gens);
    return {quad,
            gens,
            cable,
            resultants(quad),
            temperatures(quad, gens),
            lv,
            bit_temperatures(lv, quad, bandwidth_b),
            crossover_frequencies(quad, cable)};
}

}  // namespace kljn
