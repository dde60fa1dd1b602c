#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "kljn/campaign.hpp"
#include "kljn/circuit.hpp"
#include "kljn/config.hpp"
#include "kljn/errors.hpp"
#include "kljn/noise_sim.hpp"
#include "kljn/protocol.hpp"
#include "kljn/report.hpp"
#include "kljn/rng.hpp"
#include "kljn/tables.hpp"

namespace kljn::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum class Format { csv, json };

// Command-line overrides layered over the config file.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::string format = "csv";
    std::vector<double> quad;
    std::optional<double> u_la, bandwidth, length, cap_per_m, ind_per_m, frequency_scale;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> segment_len, eval_points;
    std::optional<double> overlap;
    // session
    std::optional<std::size_t> periods;
    std::optional<double> duration, sample_rate;
    std::optional<std::string> mode, one_state;
    std::optional<bool> eve;
    // campaign
    std::optional<std::size_t> trials;
    std::optional<double> campaign_duration, campaign_sample_rate;
    std::vector<double> bandwidths;
};

struct DesignArgs {
    std::string mode;
    std::optional<double> r_ha, r_lb, r_la, r_hb;
};

struct Context {
    RunConfig cfg;
    RunStamp stamp;
    fs::path out_dir;
    Format format;
};

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::unphysical_quad:
        case Errc::infeasible_match:
        case Errc::degenerate_cable:
            return kExitInfeasible;
        case Errc::ambiguous_levels:
            return kExitAmbiguousLevels;
        default:
            return kExitBadInput;
    }
}

RunConfig resolve_config(const Overrides& o) {
    RunConfig cfg = o.config_path ? load_config(*o.config_path) : RunConfig{};
    if (!o.quad.empty()) cfg.quad = ResistorQuad(o.quad[0], o.quad[1], o.quad[2], o.quad[3]);
    if (o.u_la) cfg.u_la = *o.u_la;
    if (o.bandwidth) cfg.bandwidth_b = *o.bandwidth;
    if (o.length || o.cap_per_m || o.ind_per_m) {
        cfg.cable = CableModel(o.length.value_or(cfg.cable.length_m()), o.cap_per_m.value_or(cfg.cable.cap_per_m()),
                               o.ind_per_m.value_or(cfg.cable.ind_per_m()));
    }
    if (o.frequency_scale) cfg.frequency_scale = *o.frequency_scale;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.segment_len) cfg.welch.segment_len = *o.segment_len;
    if (o.overlap) cfg.welch.overlap_fraction = *o.overlap;
    if (o.eval_points) cfg.eval_points = *o.eval_points;
    if (o.periods) cfg.session.n_bit_periods = *o.periods;
    if (o.duration) cfg.session.duration_s = *o.duration;
    if (o.sample_rate) cfg.session.sample_rate_hz = *o.sample_rate;
    if (o.mode) cfg.session.mode = parse_session_mode(*o.mode);
    if (o.one_state) cfg.session.one_state = parse_state(*o.one_state);
    if (o.eve) cfg.session.eve = *o.eve;
    if (o.trials) cfg.campaign.trials = *o.trials;
    if (o.campaign_duration) cfg.campaign.duration_s = *o.campaign_duration;
    if (o.campaign_sample_rate) cfg.campaign.sample_rate_hz = *o.campaign_sample_rate;
    if (!o.bandwidths.empty()) cfg.campaign.bandwidths = o.bandwidths;
    if (!(cfg.u_la > 0.0) || !(cfg.bandwidth_b > 0.0) || !(cfg.frequency_scale > 0.0)) {
        throw Error(Errc::invalid_argument, "u_la, bandwidth and frequency scale must be > 0");
    }
    return cfg;
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("KLJN_OUTPUT_DIR"); env && *env) return env;
    return "kljn_out";
}

void write_manifest(const Context& ctx, const std::string& subcommand, const Overrides& o) {
    ordered_json m = stamp_json(ctx.stamp);
    m["subcommand"] = subcommand;
    m["config_path"] = o.config_path ? ordered_json(*o.config_path) : ordered_json(nullptr);
    m["output_dir"] = ctx.out_dir.string();
    m["format"] = ctx.format == Format::csv ? "csv" : "json";
    m["config"] = config_to_json(ctx.cfg);
    write_json_file(ctx.out_dir / ("manifest_" + subcommand + ".json"), m);
}

void write_reports(const Context& ctx, const std::string& stem, const std::vector<FullReport>& rows) {
    if (ctx.format == Format::csv) {
        auto f = open_output(ctx.out_dir / (stem + ".csv"));
        write_report_csv(f, rows, ctx.stamp);
    } else {
        auto f = open_output(ctx.out_dir / (stem + ".json"));
        write_report_json(f, rows, ctx.stamp);
    }
}

void print_report(std::ostream& out, const FullReport& r) {
    const auto& cols = report_columns();
    const auto vals = report_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << "  " << std::left << std::setw(8) << cols[i] << ' ' << format_number(vals[i]) << '\n';
    }
}

// ---------------------------------------------------------------------------

int cmd_design(const Context& ctx, const DesignArgs& d, std::ostream& out) {
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v) throw Error(Errc::invalid_argument, "design mode " + d.mode + " needs --" + name);
        return *v;
    };
    std::optional<ResistorQuad> quad;
    if (d.mode == "zero-power") {
        const double r_hb = need(d.r_hb, "r-hb"), r_la = need(d.r_la, "r-la"), r_ha = need(d.r_ha, "r-ha");
        const double r_lb = zero_power_fourth(r_hb, r_la, r_ha);
        out << "r_lb = " << format_number(r_lb) << " ohm\n";
        quad.emplace(r_ha, r_lb, r_la, r_hb);
    } else if (d.mode == "match-parallel") {
        const double r_ha = need(d.r_ha, "r-ha"), r_la = need(d.r_la, "r-la"), r_lb = need(d.r_lb, "r-lb");
        const double r_hb = match_parallel_fourth(r_ha, r_la, r_lb);
        out << "r_hb = " << format_number(r_hb) << " ohm\n";
        quad.emplace(r_ha, r_lb, r_la, r_hb);
    } else if (d.mode == "match-serial") {
        const double r_la = need(d.r_la, "r-la"), r_hb = need(d.r_hb, "r-hb"), r_ha = need(d.r_ha, "r-ha");
        const double r_lb = match_serial_fourth(r_la, r_hb, r_ha);
        out << "r_lb = " << format_number(r_lb) << " ohm\n";
        quad.emplace(r_ha, r_lb, r_la, r_hb);
    } else {
        throw Error(Errc::invalid_argument, "unknown design mode '" + d.mode + "'");
    }
    const RunConfig scaled = apply_frequency_scale(ctx.cfg);
    const FullReport rep = full_report(*quad, scaled.u_la, scaled.cable, scaled.bandwidth_b);
    print_report(out, rep);
    write_reports(ctx, "design", {rep});
    return kExitOk;
}

int cmd_tables(const Context& ctx, std::ostream& out) {
    const auto cells = regenerate_tables();
    const auto path = ctx.out_dir / "tables.csv";
    auto f = open_output(path);
    write_tables_csv(f, cells, ctx.stamp);
    std::size_t flagged = 0;
    for (const auto& c : cells) {
        if (!c.flagged) continue;
        ++flagged;
        out << "table " << c.reference.table << ' ' << c.reference.column << ' ' << c.reference.quantity
            << ": computed " << format_number(c.computed) << ", printed " << format_number(c.reference.value)
            << '\n';
    }
    out << cells.size() << " cells regenerated, " << flagged << " deviate by more than 1%; wrote "
        << path.string() << '\n';
    return kExitOk;
}

int cmd_report(const Context& ctx, std::ostream& out) {
    const RunConfig scaled = apply_frequency_scale(ctx.cfg);
    std::vector<FullReport> rows;
    const auto& quads = scaled.campaign.quads.empty() ? std::vector<ResistorQuad>{scaled.quad} : scaled.campaign.quads;
    for (const auto& q : quads) rows.push_back(full_report(q, scaled.u_la, scaled.cable, scaled.bandwidth_b));
    for (const auto& r : rows) print_report(out, r);
    write_reports(ctx, "report", rows);
    return kExitOk;
}

int cmd_simulate(const Context& ctx, const std::optional<std::string>& waveform_state, std::ostream& out) {
    const SessionConfig sc = session_config(ctx.cfg);
    const SessionRecord rec = run_session(sc);
    // Thread count is an execution detail; leaving it out keeps sessions comparable across machines.
    auto echo = config_to_json(ctx.cfg);
    echo.erase("threads");
    write_json_file(ctx.out_dir / "session.json", session_json(rec, ctx.stamp, echo));
    out << rec.periods.size() << " bit periods (" << to_string(sc.mode) << "), " << rec.discard_count
        << " discarded, " << rec.alice_key.size() << " key bits, keys "
        << (rec.keys_agree() ? "agree" : "DISAGREE") << ", " << rec.decode_errors << " decode errors\n";
    out << "alice key " << key_hex(rec.alice_key) << '\n';
    auto leak_line = [&](const char* name, const std::optional<LeakReport>& l) {
        if (!l) return;
        out << name << " attack: " << l->n_correct << '/' << l->n_trials << " correct, p = " << format_number(l->p)
            << ", 95% [" << format_number(l->wilson_95.lo) << ", " << format_number(l->wilson_95.hi) << "]\n";
    };
    leak_line("crossover", rec.crossover_leak);
    leak_line("temperature", rec.temperature_leak);

    if (waveform_state) {
        const BitState s = parse_state(*waveform_state);
        const double fs = sc.sample_rate_hz > 0.0
                              ? sc.sample_rate_hz
                              : minimum_sample_rate(sc.quad, sc.cable, rec.gens.bandwidth_b(), kAllStates);
        const SimulationGrid grid(fs, sc.duration_s);
        const auto wave = simulate_bit_period(s, sc.quad, rec.gens, sc.cable, grid, ctx.cfg.seed);
        write_waveform(ctx.out_dir / "wire_voltage.f64", wave.wire_voltage, "V", ctx.cfg.seed);
        write_waveform(ctx.out_dir / "wire_current.f64", wave.wire_current, "A", ctx.cfg.seed);
        const std::size_t seg = effective_segment_len(sc.eve.segment_len, wave.wire_voltage.size());
        write_psd_csv(ctx.out_dir / "wire_voltage_psd.csv", welch_psd(wave.wire_voltage, seg, sc.eve.overlap_fraction));
        write_psd_csv(ctx.out_dir / "wire_current_psd.csv", welch_psd(wave.wire_current, seg, sc.eve.overlap_fraction));
        out << "wrote " << to_string(s) << " waveforms at " << format_number(fs) << " Hz\n";
    }
    return kExitOk;
}

int cmd_attack(const Context& ctx, const std::optional<std::string>& attack_mode, std::ostream& out) {
    const RunConfig scaled = apply_frequency_scale(ctx.cfg);
    AttackCampaign c;
    const auto& cc = scaled.campaign;
    c.points = campaign_grid(cc.quads.empty() ? std::vector<ResistorQuad>{scaled.quad} : cc.quads,
                             cc.bandwidths.empty() ? std::vector<double>{scaled.bandwidth_b} : cc.bandwidths,
                             cc.cables.empty() ? std::vector<CableModel>{scaled.cable} : cc.cables);
    c.u_la = scaled.u_la;
    c.trials = cc.trials;
    c.duration_s = cc.duration_s;
    c.sample_rate_hz = cc.sample_rate_hz;
    c.master_seed = scaled.seed;
    c.eve = eve_options(scaled);
    c.mode = attack_mode ? parse_session_mode(*attack_mode) : SessionMode::monte_carlo;
    c.threads = scaled.threads;

    const auto results = run_campaign(c);
    const auto summary = write_campaign(ctx.out_dir, results, ctx.stamp);
    for (const auto& r : results) {
        const auto& q = r.point.quad;
        out << "point " << r.index << " quad (" << format_number(q.r_ha()) << ", " << format_number(q.r_lb()) << ", "
            << format_number(q.r_la()) << ", " << format_number(q.r_hb()) << ") B = " << format_number(r.point.bandwidth_b)
            << " Hz\n";
        for (auto [name, leak, withheld] : {std::tuple{"crossover", r.crossover, r.crossover_withheld},
                                            std::tuple{"temperature", r.temperature, r.temperature_withheld}}) {
            out << "  " << std::left << std::setw(12) << name << " p = " << std::fixed << std::setprecision(4)
                << leak.p << "  95% [" << leak.wilson_95.lo << ", " << leak.wilson_95.hi << "]  withheld "
                << withheld << (leak.excludes_half() ? "  LEAKS" : "") << '\n';
            out.unsetf(std::ios::floatfield);
            out << std::setprecision(6);
        }
    }
    out << "wrote " << summary.string() << '\n';
    return kExitOk;
}

void add_common_options(CLI::App& app, Overrides& o) {
    app.add_option("-c,--config", o.config_path, "JSON config file");
    app.add_option("-o,--out", o.out_dir, "Output directory (default $KLJN_OUTPUT_DIR or ./kljn_out)");
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--quad", o.quad, "Resistors R_HA R_LB R_LA R_HB [ohm]")->expected(4);
    app.add_option("--u-la", o.u_la, "RMS voltage of Alice's low generator [V]");
    app.add_option("--bandwidth", o.bandwidth, "Generator noise bandwidth B [Hz]");
    app.add_option("--length", o.length, "Cable length [m]");
    app.add_option("--cap-per-m", o.cap_per_m, "Cable capacitance per meter [F/m]");
    app.add_option("--ind-per-m", o.ind_per_m, "Cable inductance per meter [H/m]");
    app.add_option("--frequency-scale", o.frequency_scale, "Multiply C, L and durations; divide B and rates");
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_option("--segment-len", o.segment_len, "Welch segment length [samples]");
    app.add_option("--overlap", o.overlap, "Welch segment overlap fraction");
    app.add_option("--eval-points", o.eval_points, "Crossover evaluation frequencies");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"KLJN / VMG-KLJN circuit analysis, session simulation and attack campaigns", "kljn"};
    app.fallthrough();
    app.require_subcommand(1);
    Overrides o;
    add_common_options(app, o);

    DesignArgs d;
    auto* design = app.add_subcommand("design", "Compute the fourth resistor and the full design report");
    design->add_option("--mode", d.mode, "zero-power | match-parallel | match-serial")
        ->required()
        ->check(CLI::IsMember({"zero-power", "match-parallel", "match-serial"}));
    design->add_option("--r-ha", d.r_ha, "R_HA [ohm]");
    design->add_option("--r-lb", d.r_lb, "R_LB [ohm]");
    design->add_option("--r-la", d.r_la, "R_LA [ohm]");
    design->add_option("--r-hb", d.r_hb, "R_HB [ohm]");

    auto* tables = app.add_subcommand("tables", "Regenerate the reference design tables and flag deviations");

    std::optional<std::string> waveform_state;
    auto* simulate = app.add_subcommand("simulate", "Run a key-exchange session");
    simulate->add_option("--periods", o.periods, "Number of bit periods");
    simulate->add_option("--duration", o.duration, "Bit period [s]");
    simulate->add_option("--sample-rate", o.sample_rate, "Sample rate [Hz] (0 = minimum admissible)");
    simulate->add_option("--mode", o.mode, "analytic | monte_carlo");
    simulate->add_option("--one-state", o.one_state, "Secure state encoding bit 1 (HL or LH)");
    simulate->add_option("--eve", o.eve, "Run the eavesdropper on secure periods (true/false)");
    simulate->add_option("--waveforms", waveform_state, "Also write one period's waveforms and spectra for this state");

    std::optional<std::string> attack_mode;
    auto* attack = app.add_subcommand("attack", "Run an attack campaign over the configured grid");
    attack->add_option("--trials", o.trials, "Trials per grid point");
    attack->add_option("--duration", o.campaign_duration, "Bit period per trial [s]");
    attack->add_option("--sample-rate", o.campaign_sample_rate, "Sample rate [Hz] (0 = minimum admissible)");
    attack->add_option("--bandwidths", o.bandwidths, "Bandwidth sweep [Hz]");
    attack->add_option("--mode", attack_mode, "monte_carlo (default) | analytic");

    auto* report = app.add_subcommand("report", "Write the full derived-quantity report of the configuration");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();  // program name
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        Context ctx{resolve_config(o), {}, o.out_dir ? fs::path(*o.out_dir) : default_out_dir(),
                    o.format == "json" ? Format::json : Format::csv};
        ctx.stamp = {config_hash(ctx.cfg), ctx.cfg.seed};
        std::string name;
        int code = kExitOk;
        if (design->parsed()) {
            name = "design";
            code = cmd_design(ctx, d, out);
        } else if (tables->parsed()) {
            name = "tables";
            code = cmd_tables(ctx, out);
        } else if (simulate->parsed()) {
            name = "simulate";
            code = cmd_simulate(ctx, waveform_state, out);
        } else if (attack->parsed()) {
            name = "attack";
            code = cmd_attack(ctx, attack_mode, out);
        } else if (report->parsed()) {
            name = "report";
            code = cmd_report(ctx, out);
        }
        write_manifest(ctx, name, o);
        return code;
    } catch (const Error& e) {
        err << "kljn: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "kljn: " << e.what() << '\n';
        return kExitBadInput;
    }
}

}  // namespace kljn::cli
