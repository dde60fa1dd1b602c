#include <cmath>
#include <limits>

#include "doctest.h"
#include "kljn/circuit.hpp"
#include "kljn/errors.hpp"
#include "support/oracles.hpp"

using namespace kljn;
using doctest::Approx;

namespace {
const CableModel kCapCable{2000, 100e-12, 0.0};
const CableModel kIndCable{2000, 0.0, 0.7e-6};
const CableModel kFullCable{2000, 100e-12, 0.7e-6};

bool within(double value, double expected, double rel_tol) {
    return std::abs(value - expected) <= rel_tol * std::abs(expected);
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_error;  // sentinel: nothing thrown
}
}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("bit states and choices") {
    CHECK(make_state(Choice::H, Choice::L) == BitState::HL);
    CHECK(make_state(Choice::L, Choice::H) == BitState::LH);
    for (BitState s : kAllStates) {
        CHECK(make_state(alice_choice(s), bob_choice(s)) == s);
        CHECK(parse_state(to_string(s)) == s);
    }
    CHECK(is_secure(BitState::HL));
    CHECK(is_secure(BitState::LH));
    CHECK_FALSE(is_secure(BitState::HH));
    CHECK_FALSE(is_secure(BitState::LL));
    CHECK(code_of([] { parse_state("HX"); }) == Errc::invalid_argument);
}

TEST_CASE("resistor quad validation and connections") {
    CHECK(code_of([] { ResistorQuad(0, 1, 1, 1); }) == Errc::invalid_argument);
    CHECK(code_of([] { ResistorQuad(1, -1, 1, 1); }) == Errc::invalid_argument);
    CHECK(code_of([] { ResistorQuad(1, 1, std::nan(""), 1); }) == Errc::invalid_argument);
    const ResistorQuad q(10, 2, 3, 40);
    CHECK(q.connected(BitState::HL) == std::pair{10.0, 2.0});
    CHECK(q.connected(BitState::LH) == std::pair{3.0, 40.0});
    CHECK(q.connected(BitState::HH) == std::pair{10.0, 40.0});
    CHECK(q.connected(BitState::LL) == std::pair{3.0, 2.0});
    CHECK(ResistorQuad(9000, 1000, 1000, 9000).is_classical());
    CHECK(ResistorQuad(9000, 1000, 1000 * (1 + 1e-13), 9000).is_classical());
    CHECK_FALSE(ResistorQuad(9000, 1000, 1000 * (1 + 1e-9), 9000).is_classical());
    CHECK_FALSE(q.is_classical());
}

TEST_CASE("cable validation") {
    CHECK(code_of([] { CableModel(0, 1e-10, 0); }) == Errc::invalid_argument);
    CHECK(code_of([] { CableModel(10, -1e-10, 0); }) == Errc::invalid_argument);
    CHECK(kFullCable.capacitance() == Approx(2e-7));
    CHECK(kFullCable.inductance() == Approx(1.4e-3));
    const CableModel s = kFullCable.frequency_scaled(10);
    CHECK(s.capacitance() == Approx(2e-6));
    CHECK(s.inductance() == Approx(1.4e-2));
}

TEST_CASE("resultants: published examples") {
    auto r = resultants({9000, 1000, 1000, 9000});
    CHECK(r.r_p_hl == Approx(900));
    CHECK(r.r_p_lh == Approx(900));
    CHECK(r.r_s_hl == Approx(10000));
    CHECK(r.r_s_lh == Approx(10000));
    r = resultants({10000, 5000, 1000, 9000});
    CHECK(r.r_p_hl == Approx(3333.333333));
    CHECK(r.r_p_lh == Approx(900));
    CHECK(r.r_s_hl == Approx(15000));
    CHECK(r.r_s_lh == Approx(10000));
    r = resultants({7, 7, 7, 7});
    CHECK(r.r_p_hl == Approx(3.5));
    CHECK(r.r_s_lh == Approx(14));
}

TEST_CASE("vmg_solve: published generator voltages") {
    auto g = vmg_solve({9000, 1000, 1000, 9000}, 1.0, 1000);
    CHECK(g.u_ha() == Approx(3).epsilon(1e-12));
    CHECK(g.u_lb() == Approx(1).epsilon(1e-12));
    CHECK(g.u_la() == 1.0);
    CHECK(g.u_hb() == Approx(3).epsilon(1e-12));

    g = vmg_solve({9000, 1000, 500, 18000}, 1.0, 1000);
    CHECK(within(g.u_ha(), 3.12, 0.01));
    CHECK(within(g.u_lb(), 1.04, 0.01));
    CHECK(within(g.u_hb(), 6.0, 0.01));

    g = vmg_solve({9000, 1000, 2000, 4500}, 1.0, 1000);
    CHECK(within(g.u_ha(), 2.63, 0.01));
    CHECK(within(g.u_lb(), 0.877, 0.01));
    CHECK(within(g.u_hb(), 1.5, 0.01));
}

TEST_CASE("vmg_solve scales with u_la and rejects bad input") {
    const ResistorQuad q(10000, 5000, 1000, 9000);
    const auto g1 = vmg_solve(q, 1.0, 1000);
    const auto g3 = vmg_solve(q, 3.0, 1000);
    CHECK(g3.u_ha() == Approx(3 * g1.u_ha()).epsilon(1e-12));
    CHECK(g3.u_hb() == Approx(3 * g1.u_hb()).epsilon(1e-12));
    CHECK(code_of([&] { vmg_solve(q, 0.0, 1000); }) == Errc::invalid_argument);
    CHECK(code_of([&] { vmg_solve(q, 1.0, 0.0); }) == Errc::invalid_argument);
}

TEST_CASE("vmg_solve reports unphysical quads instead of clamping") {
    // A parallel-matched quad whose power constraint forces a negative U².
    int unphysical = 0;
    for (double r_hb : {10.0, 50.0, 1e5, 1e6}) {
        for (double r_lb : {1.0, 1e4, 1e6}) {
            try {
                const auto g = vmg_solve({1000, r_lb, 100, r_hb}, 1.0, 1000);
                const auto res = constraint_residuals({1000, r_lb, 100, r_hb}, g);
                for (double x : res) CHECK(x < 1e-9);
            } catch (const Error& e) {
                CHECK(e.code() == Errc::unphysical_quad);
                ++unphysical;
            }
        }
    }
    CHECK(unphysical > 0);
}

TEST_CASE("closed-form cross-check agrees with the linear solve") {
    for (const ResistorQuad& q : {ResistorQuad{9000, 1000, 1000, 9000}, ResistorQuad{9000, 1000, 500, 18000},
                                  ResistorQuad{10000, 5000, 1000, 9000}, ResistorQuad{5000, 5000, 1000, 9000}}) {
        const auto g = vmg_solve(q, 1.0, 1000);
        const auto cf = vmg_closed_form(q, 1.0);
        CHECK(cf[0] == Approx(g.u_ha() * g.u_ha()).epsilon(1e-9));
        CHECK(cf[1] == Approx(g.u_lb() * g.u_lb()).epsilon(1e-9));
        CHECK(cf[2] == Approx(g.u_hb() * g.u_hb()).epsilon(1e-9));
    }
}

TEST_CASE("temperatures: published values") {
    auto t = temperatures({9000, 1000, 1000, 9000}, vmg_solve({9000, 1000, 1000, 9000}, 1.0, 1000));
    for (double x : {t.t_ha, t.t_lb, t.t_la, t.t_hb}) CHECK(within(x, 1.81e16, 0.01));
    const ResistorQuad b(9000, 1000, 500, 18000);
    t = temperatures(b, vmg_solve(b, 1.0, 1000));
    CHECK(within(t.t_ha, 1.96e16, 0.01));
    CHECK(within(t.t_lb, 1.96e16, 0.01));
    CHECK(within(t.t_la, 3.62e16, 0.01));
    CHECK(within(t.t_hb, 3.62e16, 0.01));
    CHECK(noise_temperature(0.0, 1000, 1000) == 0.0);
    CHECK(noise_temperature(2.0, 1000, 1000) == Approx(4.0 / (4 * kBoltzmann * 1000 * 1000)));
}

TEST_CASE("wire levels: published values and oracle superposition") {
    const ResistorQuad a(9000, 1000, 1000, 9000);
    const auto lv = wire_levels(a, vmg_solve(a, 1.0, 1000));
    CHECK(within(lv.u_hl, 0.948, 0.01));
    CHECK(within(lv.u_lh, 0.948, 0.01));
    CHECK(within(lv.i_hl, 3.16e-4, 0.01));
    CHECK(within(lv.i_lh, 3.16e-4, 0.01));
    CHECK(std::abs(lv.p_hl) < 1e-12 * lv.u_hl * lv.i_hl);

    const ResistorQuad b(100, 10, 50, 60);
    const auto gb = vmg_solve(b, 1.0, 1000);
    const auto lb = wire_levels(b, gb);
    CHECK(within(lb.p_hl, -0.00606, 0.01));
    CHECK(within(lb.p_lh, -0.00606, 0.01));

    const auto o = oracle::loop(b.r_ha(), gb.u_ha(), b.r_lb(), gb.u_lb());
    CHECK(lb.u_hl * lb.u_hl == Approx(o.u2).epsilon(1e-12));
    CHECK(lb.i_hl * lb.i_hl == Approx(o.i2).epsilon(1e-12));
    CHECK(lb.p_hl == Approx(o.p).epsilon(1e-12));

    const auto z = wire_levels(b, GeneratorSet(0, 0, 0, 0, 1000));
    CHECK(z.u_hl == 0.0);
    CHECK(z.i_lh == 0.0);
    CHECK(z.p_hl == 0.0);
}

TEST_CASE("fourth-resistor designs") {
    CHECK(zero_power_fourth(18000, 500, 9000) == Approx(1000));
    CHECK(zero_power_fourth(4500, 2000, 9000) == Approx(1000));
    CHECK(zero_power_fourth(9000, 1000, 9000) == Approx(1000));

    CHECK(match_parallel_fourth(2000, 100, 90) == Approx(620.69).epsilon(1e-5));
    CHECK(match_parallel_fourth(1000, 200, 160) == Approx(444.44).epsilon(1e-5));
    CHECK(match_parallel_fourth(10000, 500, 500) == Approx(10000).epsilon(1e-12));
    auto r = resultants({2000, 90, 100, match_parallel_fourth(2000, 100, 90)});
    CHECK(r.r_p_hl == Approx(86.1).epsilon(1e-3));
    CHECK(oracle::rel(r.r_p_hl, r.r_p_lh) < 1e-12);
    CHECK(code_of([] { match_parallel_fourth(1000, 100, 1e6); }) == Errc::infeasible_match);

    CHECK(match_serial_fourth(500, 2500, 2000) == 1000);
    CHECK(match_serial_fourth(200, 1300, 1000) == 500);
    CHECK(match_serial_fourth(5000, 10000, 10000) == 5000);
    r = resultants({1000, match_serial_fourth(200, 1300, 1000), 200, 1300});
    CHECK(r.r_s_hl == 1500);
    CHECK(r.r_s_lh == 1500);
    CHECK(code_of([] { match_serial_fourth(100, 100, 1000); }) == Errc::infeasible_match);
    CHECK(code_of([] { match_serial_fourth(100, 900, 1000); }) == Errc::infeasible_match);
}

TEST_CASE("crossover frequencies: published values") {
    auto f = crossover_frequencies({9000, 1000, 1000, 9000}, kCapCable);
    CHECK(within(f.f_ucr_hl, 884, 0.005));
    CHECK(within(f.f_ucr_lh, 884, 0.005));
    f = crossover_frequencies({10000, 5000, 1000, 9000}, kCapCable);
    CHECK(within(f.f_ucr_hl, 239, 0.005));
    CHECK(within(f.f_ucr_lh, 884, 0.005));
    CHECK(std::isinf(f.f_icr_hl));
    f = crossover_frequencies({10000, 5000, 1000, 9000}, kIndCable);
    CHECK(within(f.f_icr_hl, 1.71e6, 0.005));
    CHECK(within(f.f_icr_lh, 1.14e6, 0.005));
    CHECK(std::isinf(f.f_ucr_lh));
    CHECK(voltage_crossover(1000, 1e-6) == Approx(1.0 / (2 * oracle::kPi * 1e-3)));
    CHECK(current_crossover(1000, 1e-3) == Approx(1000 / (2 * oracle::kPi * 1e-3)));
    CHECK(code_of([] { require_finite_crossover(std::numeric_limits<double>::infinity(), "f"); }) ==
          Errc::degenerate_cable);
    CHECK(require_finite_crossover(5.0, "f") == 5.0);
}

TEST_CASE("lorentzian and band-limited mean square") {
    CHECK(lorentzian(3.0, 50, 0) == 3.0);
    CHECK(lorentzian(3.0, 50, 50) == Approx(1.5));
    CHECK(lorentzian(1.0, 50, 100) == Approx(0.2));
    CHECK(band_limited_ms(2.0, 40, 40) == Approx(2.0 * 40 * oracle::kPi / 4));
    CHECK(band_limited_ms(2.0, 40, 0) == 0.0);
    CHECK(band_limited_ms(2.0, std::numeric_limits<double>::infinity(), 25) == Approx(50));
    // Small B limit approaches the white value s0·B.
    CHECK(band_limited_ms(1.0, 1e6, 10) == Approx(10).epsilon(1e-9));
    // Infinite-B limit for a resistor at temperature T shunted by C: kT/C.
    const double r = 1e4, t = 300, c = 1e-9;
    const double s0 = 4 * kBoltzmann * t * r;  // V²/Hz of the resistor noise
    const double f_cr = 1 / (2 * oracle::kPi * r * c);
    CHECK(band_limited_ms(s0, f_cr, 1e15) == Approx(kBoltzmann * t / c).epsilon(1e-6));
}

TEST_CASE("bit temperatures: published values") {
    auto rep = full_report({9000, 1000, 1000, 9000}, 1.0, kFullCable, 1000);
    for (double x : {rep.bit_temps.t_u_hl, rep.bit_temps.t_u_lh, rep.bit_temps.t_i_hl, rep.bit_temps.t_i_lh})
        CHECK(within(x, 1.81e16, 0.01));
    rep = full_report({10000, 5000, 1000, 9000}, 1.0, kFullCable, 1000);
    CHECK(within(rep.bit_temps.t_u_hl, 4.48e15, 0.01));
    CHECK(within(rep.bit_temps.t_u_lh, 1.66e16, 0.01));
    CHECK(within(rep.bit_temps.t_i_hl, 6.54e15, 0.01));
    CHECK(within(rep.bit_temps.t_i_lh, 4.36e15, 0.01));
}

TEST_CASE("full_report: published design columns") {
    auto rep = full_report({2000, 90, 100, match_parallel_fourth(2000, 100, 90)}, 1.0, kFullCable, 1000);
    CHECK(within(rep.crossovers.f_ucr_hl, 9239, 0.005));
    CHECK(within(rep.crossovers.f_ucr_lh, 9239, 0.005));
    CHECK(within(rep.crossovers.f_icr_hl, 237596, 0.005));
    CHECK(within(rep.crossovers.f_icr_lh, 81930, 0.005));
    CHECK(within(rep.levels.p_hl, 0.000453, 0.01));

    rep = full_report({10000, 1000, 1000, 10000}, 1.0, kFullCable, 1000);
    for (double x : {rep.temps.t_ha, rep.temps.t_lb, rep.temps.t_la, rep.temps.t_hb, rep.bit_temps.t_u_hl,
                     rep.bit_temps.t_i_lh})
        CHECK(within(x, 1.81e16, 0.01));
    CHECK(within(rep.crossovers.f_ucr_hl, 875, 0.005));
    CHECK(within(rep.crossovers.f_icr_lh, 1.25e6, 0.005));
    CHECK(std::abs(rep.levels.p_hl) <= 1e-12 * rep.levels.u_hl * rep.levels.i_hl);
    CHECK(std::abs(rep.levels.p_lh) <= 1e-12 * rep.levels.u_lh * rep.levels.i_lh);
}

TEST_CASE("filtered mean squares stay below the white levels") {
    const ResistorQuad q(10000, 5000, 1000, 9000);
    const auto g = vmg_solve(q, 1.0, 1000);
    for (BitState s : kAllStates) {
        const auto white = state_mean_squares(q, g, s);
        const auto filt = filtered_mean_squares(q, g, kFullCable, s);
        CHECK(filt.u2 < white.u2);
        CHECK(filt.i2 < white.i2);
        const auto none = filtered_mean_squares(q, g, CableModel(1, 0, 0), s);
        CHECK(none.u2 == Approx(white.u2).epsilon(1e-12));
        CHECK(none.i2 == Approx(white.i2).epsilon(1e-12));
    }
}

TEST_CASE("relative difference") {
    CHECK(relative_difference(0, 0) == 0);
    CHECK(relative_difference(1, 2) == Approx(0.5));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(relative_difference(inf, inf) == 0);
}

}  // TEST_SUITE
