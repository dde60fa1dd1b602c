// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Monte-Carlo criteria use fixed seeds so every run reproduces the same counts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kljn/attacks.hpp"
#include "kljn/campaign.hpp"
#include "kljn/circuit.hpp"
#include "kljn/errors.hpp"
#include "kljn/parallel.hpp"
#include "kljn/protocol.hpp"
#include "kljn/report.hpp"
#include "kljn/rng.hpp"
#include "kljn/simd.hpp"
#include "kljn/tables.hpp"
#include "support/oracles.hpp"

using namespace kljn;

namespace {

unsigned g_threads = 0;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s;  // 0 = unbounded
    std::function<Outcome()> check;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::string interval(const LeakReport& l) {
    return "p=" + fmt(l.p, 3) + " [" + fmt(l.wilson_95.lo, 3) + ", " + fmt(l.wilson_95.hi, 3) + "] n=" +
           std::to_string(l.n_trials);
}

bool contains_half(const LeakReport& l) { return !l.excludes_half(); }

// ---------------------------------------------------------------------------
// Table reproduction

const std::vector<TableCell>& cells() {
    static const std::vector<TableCell> all = regenerate_tables();
    return all;
}

bool is_crossover(const std::string& q) { return q.starts_with("f_"); }

/// Checks every cell of the listed tables: crossovers at 0.5%, zero powers on
/// the natural power scale, everything else at 1%.
Outcome check_tables(std::initializer_list<int> tables) {
    std::size_t n = 0, bad = 0;
    double worst = 0;
    std::string worst_name, failures;
    for (const auto& c : cells()) {
        bool wanted = false;
        for (int t : tables) wanted |= c.reference.table == t;
        if (!wanted) continue;
        ++n;
        const double tol = c.reference.value == 0.0 ? kZeroPowerRelTol
                           : is_crossover(c.reference.quantity) ? 0.005
                                                                : kTableRelTol;
        if (c.deviation > worst) {
            worst = c.deviation;
            worst_name = "T" + std::to_string(c.reference.table) + "/" + c.reference.column + "/" + c.reference.quantity;
        }
        if (c.deviation > tol) {
            ++bad;
            failures += " T" + std::to_string(c.reference.table) + "/" + c.reference.column + "/" +
                        c.reference.quantity + " computed " + fmt(c.computed) + " vs printed " +
                        fmt(c.reference.value) + " (" + fmt(100 * c.deviation, 3) + "%)";
        }
    }
    std::string detail = std::to_string(n - bad) + "/" + std::to_string(n) + " cells within tolerance, worst " +
                         worst_name + " " + fmt(100 * worst, 3) + "%";
    if (bad) detail += ";" + failures;
    return {bad == 0 && n > 0, detail};
}

std::string round_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

Outcome check_designs() {
    struct Design {
        const char* name;
        double computed, printed;
    };
    const Design designs[] = {
        {"T6/A R_HB", match_parallel_fourth(2000, 100, 90), 620.7},
        {"T6/B R_HB", match_parallel_fourth(1000, 200, 160), 444.4},
        {"T7/A R_LB", match_serial_fourth(500, 2500, 2000), 1000},
        {"T7/B R_LB", match_serial_fourth(200, 1300, 1000), 500},
    };
    bool ok = true;
    std::string detail;
    for (const auto& d : designs) {
        const bool match = round_sig(d.computed, 4) == round_sig(d.printed, 4);
        ok &= match;
        detail += std::string(d.name) + "=" + round_sig(d.computed, 6) + (match ? " " : " (MISMATCH) ");
    }
    double worst = 0;
    for (const char* col : {"A", "B", "C"}) {
        const auto p = resultants(table_quad(6, col));
        const auto s = resultants(table_quad(7, col));
        worst = std::max({worst, relative_difference(p.r_p_hl, p.r_p_lh), relative_difference(s.r_s_hl, s.r_s_lh)});
    }
    ok &= worst <= 1e-12;
    detail += "; matched resultants max rel diff " + fmt(worst, 3);
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// Monte-Carlo properties

AttackCampaign campaign_for(std::vector<CampaignPoint> points, std::size_t trials, double duration_s,
                            std::uint64_t seed, double sample_rate_hz = 0.0) {
    AttackCampaign c;
    c.points = std::move(points);
    c.trials = trials;
    c.duration_s = duration_s;
    c.sample_rate_hz = sample_rate_hz;
    c.master_seed = seed;
    c.threads = g_threads;
    return c;
}

bool analytic_indistinguishable(const ResistorQuad& q, const CableModel& cable, double b) {
    const auto g = vmg_solve(q, 1.0, b);
    const auto sum = spectral_summary(q, g, cable);
    const auto temps = temperature_predictions(q, g, cable);
    for (BitState s : {BitState::HL, BitState::LH}) {
        const auto v = run_attacks(observe_analytic(q, g, cable, s), sum, temps);
        if (v.crossover || v.temperature) return false;
    }
    return true;
}

Outcome check_classical_immunity() {
    const ResistorQuad q(9000, 1000, 1000, 9000);
    // Desk scale: inductance raised a hundredfold so the current knee (11.4 kHz)
    // can be sampled directly instead of at megahertz rates.
    const CableModel cable(2000, 100e-12, 0.7e-4);
    bool analytic = true;
    for (double r_l : {10.0, 100.0, 1000.0, 5000.0})
        for (double ratio : {2.0, 9.0, 40.0})
            analytic &= analytic_indistinguishable({r_l * ratio, r_l, r_l, r_l * ratio}, CableModel(2000, 100e-12, 0.7e-6), 1000);
    const auto r = run_campaign(campaign_for({{q, 1000, cable}}, 2000, 0.2, 101)).front();
    const bool ok = analytic && contains_half(r.crossover) && contains_half(r.temperature);
    return {ok, std::string("analytic verdicts withheld: ") + (analytic ? "yes" : "NO") + "; crossover " +
                    interval(r.crossover) + " withheld " + std::to_string(r.crossover_withheld) + "; temperature " +
                    interval(r.temperature) + " withheld " + std::to_string(r.temperature_withheld) +
                    "; fs=" + fmt(r.sample_rate_hz, 6) + " Hz"};
}

Outcome check_vmg_vulnerability() {
    const ResistorQuad q = table_quad(2, "2");
    // Voltage channel only: the inductive knee lies at megahertz and plays no role.
    const CableModel cable(2000, 100e-12, 0);
    const double duration = 500.0 / 1000;  // 500/B, above the 200/B floor
    const auto r = run_campaign(campaign_for({{q, 1000, cable}}, 500, duration, 202)).front();
    return {r.crossover.excludes_half(), "crossover " + interval(r.crossover) + " withheld " +
                                             std::to_string(r.crossover_withheld) + "; T=" + fmt(duration) +
                                             " s, fs=" + fmt(r.sample_rate_hz, 6) + " Hz"};
}

Outcome check_bandwidth_defense() {
    const ResistorQuad q = table_quad(2, "2");
    const CableModel cable(2000, 100e-12, 0);
    const auto f = crossover_frequencies(q, cable);
    const double f_cr = std::min(f.f_ucr_hl, f.f_ucr_lh);
    std::vector<CampaignPoint> points;
    for (double div : {4.0, 16.0, 64.0}) points.push_back({q, f_cr / div, cable});
    // One sample rate for the whole sweep so only B changes between points.
    const double fs = kOversampling * std::max(f.f_ucr_hl, f.f_ucr_lh);
    const auto res = run_campaign(campaign_for(points, 300, 10.0, 303, fs));
    bool ok = true;
    std::string detail = "f_cr=" + fmt(f_cr) + " Hz;";
    for (std::size_t i = 0; i < res.size(); ++i) {
        detail += " B=" + fmt(res[i].point.bandwidth_b) + ": " + interval(res[i].temperature) + ";";
        if (i > 0) {
            const auto& prev = res[i - 1].temperature;
            const auto& cur = res[i].temperature;
            const bool overlap = cur.wilson_95.lo <= prev.wilson_95.hi && prev.wilson_95.lo <= cur.wilson_95.hi;
            ok &= cur.p <= prev.p || overlap;
        }
    }
    ok &= contains_half(res.back().temperature);
    return {ok, detail};
}

// Desk-scale cable for the matched designs: C and L raised so both knees fall
// inside a 1 kHz band.
const CableModel kDeskCable(2000, 1e-8, 1.4e-4);

Outcome check_matched_defense() {
    const ResistorQuad par = table_quad(8, "A");
    const ResistorQuad ser = table_quad(8, "B");
    bool ok = true;
    std::string detail;
    struct Case {
        const char* name;
        ResistorQuad quad;
        Channel blind, open;
    };
    std::vector<CampaignPoint> points;
    const Case cases[] = {{"parallel", par, Channel::voltage, Channel::current},
                          {"serial", ser, Channel::current, Channel::voltage}};
    for (const auto& c : cases) {
        // Analytic: the blind channel alone never yields a verdict.
        const auto g = vmg_solve(c.quad, 1.0, 1000);
        const auto sum = spectral_summary(c.quad, g, kDeskCable);
        const auto temps = temperature_predictions(c.quad, g, kDeskCable);
        const auto obs = observe_analytic(c.quad, g, kDeskCable, BitState::HL);
        CrossoverMeasurement xo;
        MeanSquareMeasurement ms;
        if (c.blind == Channel::voltage) {
            xo.voltage_fcr = obs.crossovers.voltage_fcr;
            ms.u_c_ms = obs.mean_squares.u_c_ms;
        } else {
            xo.current_fcr = obs.crossovers.current_fcr;
            ms.i_l_ms = obs.mean_squares.i_l_ms;
        }
        auto blind = [](auto&& fn) {
            try {
                fn();
            } catch (const Error& e) {
                return e.code() == Errc::indistinguishable_hypotheses;
            }
            return false;
        };
        const bool xo_blind = blind([&] { crossover_attack(xo, sum); });
        const bool t_blind = blind([&] { temperature_attack(ms, temps); });
        ok &= xo_blind && t_blind;
        detail += std::string(c.name) + ": " + std::string(to_string(c.blind)) + " channel " +
                  (xo_blind && t_blind ? "indistinguishable" : "DISTINGUISHES") + "; ";
        points.push_back({c.quad, 1000, kDeskCable});
    }
    const auto res = run_campaign(campaign_for(points, 200, 0.5, 404));
    for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& r = res[i];
        std::size_t wrong_channel = 0;
        for (const auto& t : r.trials) {
            if (t.verdicts.crossover && t.verdicts.crossover->channel != cases[i].open) ++wrong_channel;
            if (t.verdicts.temperature && t.verdicts.temperature->channel != cases[i].open) ++wrong_channel;
        }
        const bool leak = r.crossover.excludes_half() && r.temperature.excludes_half() && wrong_channel == 0;
        ok &= leak;
        detail += std::string(cases[i].name) + " via " + std::string(to_string(cases[i].open)) + ": crossover " +
                  interval(r.crossover) + ", temperature " + interval(r.temperature) +
                  (wrong_channel ? ", verdicts from blind channel: " + std::to_string(wrong_channel) : "") + "; ";
    }
    return {ok, detail};
}

Outcome check_impossibility() {
    Rng rng(505);
    auto draw = [&] { return 10.0 * std::exp(std::log(1e4) * rng.uniform_open()); };
    std::size_t checked = 0, both = 0, by_kind[3] = {0, 0, 0};
    while (checked < 1000) {
        const int kind = static_cast<int>(checked % 3);
        std::optional<ResistorQuad> q;
        try {
            const double a = draw(), b = draw(), c = draw(), d = draw();
            if (kind == 0) q.emplace(a, c, b, match_parallel_fourth(a, b, c));
            else if (kind == 1) q.emplace(a, match_serial_fourth(b, c, a), b, c);
            else q.emplace(a, b, c, d);
        } catch (const Error&) {
            continue;
        }
        if (q->is_classical()) continue;
        const auto r = resultants(*q);
        if (relative_difference(r.r_p_hl, r.r_p_lh) <= 1e-9 && relative_difference(r.r_s_hl, r.r_s_lh) <= 1e-9) ++both;
        ++by_kind[kind];
        ++checked;
    }
    return {both == 0, std::to_string(checked) + " non-classical quads (" + std::to_string(by_kind[0]) +
                           " parallel-matched, " + std::to_string(by_kind[1]) + " serial-matched, " +
                           std::to_string(by_kind[2]) + " free), " + std::to_string(both) + " match both"};
}

Outcome check_oracles() {
    Rng rng(606);
    auto log_u = [&](double lo, double hi) { return lo * std::exp(std::log(hi / lo) * rng.uniform_open()); };
    double worst_quad = 0;
    for (int i = 0; i < 100; ++i) {
        const double s0 = log_u(1e-9, 1), f_cr = log_u(1, 1e6), b = log_u(1, 1e6);
        const double q = oracle::simpson([&](double f) { return s0 / (1 + (f / f_cr) * (f / f_cr)); }, 0, b, 1e-10);
        worst_quad = std::max(worst_quad, oracle::rel(band_limited_ms(s0, f_cr, b), q));
    }

    double worst_vmg = 0;
    int solved = 0;
    while (solved < 500) {
        const ResistorQuad q(log_u(10, 1e5), log_u(10, 1e5), log_u(10, 1e5), log_u(10, 1e5));
        std::optional<GeneratorSet> g;
        try {
            g = vmg_solve(q, log_u(0.1, 10), 1000);
        } catch (const Error&) {
            continue;
        }
        ++solved;
        const auto hl = oracle::loop(q.r_ha(), g->u_ha(), q.r_lb(), g->u_lb());
        const auto lh = oracle::loop(q.r_la(), g->u_la(), q.r_hb(), g->u_hb());
        const double p_scale = std::max({std::abs(hl.p), std::abs(lh.p), std::sqrt(hl.u2 * hl.i2)});
        worst_vmg = std::max({worst_vmg, oracle::rel(hl.u2, lh.u2), oracle::rel(hl.i2, lh.i2),
                              std::abs(hl.p - lh.p) / p_scale});
    }

    double worst_fit = 0;
    for (int i = 0; i < 100; ++i) {
        const double s0 = log_u(1e-12, 1), f_cr = log_u(1, 1e6);
        auto exact = [&](double f) -> std::optional<double> { return lorentzian(s0, f_cr, f); };
        std::vector<double> freqs;
        for (int k = 0; k < 5; ++k) freqs.push_back(f_cr * log_u(0.05, 20));
        worst_fit = std::max(worst_fit, oracle::rel(estimate_crossover_fn(exact, s0, freqs), f_cr));
    }
    const bool ok = worst_quad <= 1e-6 && worst_vmg <= 1e-9 && worst_fit <= 1e-9;
    return {ok, "band-limited mean square vs quadrature " + fmt(worst_quad, 3) + " (<=1e-6); generator solution vs loop "
                "equations " + fmt(worst_vmg, 3) + " (<=1e-9); crossover inversion " + fmt(worst_fit, 3) + " (<=1e-9)"};
}

// ---------------------------------------------------------------------------
// Determinism

std::string drop_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    for (std::string line; std::getline(in, line);) {
        if (line.find("generated_at") == std::string::npos) out << line << '\n';
    }
    return out.str();
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string session_bytes(unsigned threads) {
    SessionConfig cfg;
    cfg.quad = table_quad(2, "2");
    cfg.cable = CableModel(2000, 100e-12, 0);
    cfg.mode = SessionMode::monte_carlo;
    cfg.duration_s = 1.0;
    cfg.n_bit_periods = 16;
    cfg.master_seed = 707;
    cfg.eve_enabled = true;
    cfg.threads = threads;
    return drop_timestamp(session_json(run_session(cfg), RunStamp{"0123456789abcdef", 707}, {}).dump(2));
}

std::string campaign_bytes(unsigned threads, const std::filesystem::path& dir) {
    const ResistorQuad q = table_quad(2, "2");
    auto c = campaign_for({{q, 1000, CableModel(2000, 100e-12, 0)}, {q, 250, CableModel(2000, 100e-12, 0)}}, 24,
                          0.25, 708);
    c.threads = threads;
    std::filesystem::remove_all(dir);
    const auto results = run_campaign(c);
    write_campaign(dir, results, RunStamp{"0123456789abcdef", 708});
    std::string all;
    for (const char* name : {"summary.csv", "trials_0.jsonl", "trials_1.jsonl"}) all += drop_timestamp(read_all(dir / name));
    return all;
}

Outcome check_determinism() {
    const unsigned many = std::max(2u, resolve_threads(g_threads));
    const auto base = std::filesystem::temp_directory_path() / "kljn_acceptance_determinism";
    const std::string s1 = session_bytes(1), s2 = session_bytes(1), s3 = session_bytes(many);
    const std::string c1 = campaign_bytes(1, base / "a"), c2 = campaign_bytes(1, base / "b"),
                      c3 = campaign_bytes(many, base / "c");
    std::filesystem::remove_all(base);
    const bool session_ok = s1 == s2 && s1 == s3 && !s1.empty();
    const bool campaign_ok = c1 == c2 && c1 == c3 && !c1.empty();
    return {session_ok && campaign_ok,
            std::string("session output ") + (session_ok ? "identical" : "DIFFERS") + " (" + std::to_string(s1.size()) +
                " bytes); campaign output " + (campaign_ok ? "identical" : "DIFFERS") + " (" +
                std::to_string(c1.size()) + " bytes); thread counts 1 and " + std::to_string(many)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    app.add_option("--threads", g_threads, "Worker threads (0 = all cores)");
    std::string only;
    app.add_option("--only", only, "Run only criteria whose name contains this text");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {"table-1 zero-power designs", 1.0, [] { return check_tables({1}); }},
        {"tables-2-3 crossover frequencies", 1.0, [] { return check_tables({2, 3}); }},
        {"tables-4-5 bit temperatures", 1.0, [] { return check_tables({4, 5}); }},
        {"tables-6-7 matched designs", 1.0, [] { return check_designs(); }},
        {"table-8 matched design reports", 1.0, [] { return check_tables({8}); }},
        {"classical immunity", 120.0, check_classical_immunity},
        {"VMG vulnerability", 300.0, check_vmg_vulnerability},
        {"bandwidth-reduction defense", 0.0, check_bandwidth_defense},
        {"matched-resultant defense", 0.0, check_matched_defense},
        {"parallel/serial impossibility", 0.0, check_impossibility},
        {"oracle checks", 0.0, check_oracles},
        {"determinism", 0.0, check_determinism},
    };

    std::cout << "threads: " << resolve_threads(g_threads) << ", SIMD: " << simd::to_string(simd::active_level()) << '\n';
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && c.name.find(only) == std::string::npos) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt(secs, 3) + " s";
        if (c.time_limit_s > 0) {
            timing += " (limit " + fmt(c.time_limit_s) + " s)";
            if (secs > c.time_limit_s) {
                o.pass = false;
                timing += " TOO SLOW";
            }
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " | " << o.detail << " | " << timing << std::endl;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << '\n';
    return failures ? 1 : 0;
}
