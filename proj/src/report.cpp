#include "kljn/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>

#include "kljn/errors.hpp"

namespace kljn {

using nlohmann::ordered_json;

std::string timestamp_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{
        "R_HA",    "R_LB",    "R_LA",    "R_HB",    "U_HA",    "U_LB",    "U_LA",   "U_HB",
        "T_HA",    "T_LB",    "T_LA",    "T_HB",    "R_pHL",   "R_pLH",   "R_sHL",  "R_sLH",
        "T_uHL",   "T_uLH",   "T_iHL",   "T_iLH",   "U_HL",    "U_LH",    "I_HL",   "I_LH",
        "P_HL",    "P_LH",    "f_ucrHL", "f_ucrLH", "f_icrHL", "f_icrLH"};
    return cols;
}

std::vector<double> report_values(const FullReport& r) {
    const auto& q = r.quad;
    const auto& g = r.gens;
    return {q.r_ha(),          q.r_lb(),          q.r_la(),          q.r_hb(),
            g.u_ha(),          g.u_lb(),          g.u_la(),          g.u_hb(),
            r.temps.t_ha,      r.temps.t_lb,      r.temps.t_la,      r.temps.t_hb,
            r.res.r_p_hl,      r.res.r_p_lh,      r.res.r_s_hl,      r.res.r_s_lh,
            r.bit_temps.t_u_hl, r.bit_temps.t_u_lh, r.bit_temps.t_i_hl, r.bit_temps.t_i_lh,
            r.levels.u_hl,     r.levels.u_lh,     r.levels.i_hl,     r.levels.i_lh,
            r.levels.p_hl,     r.levels.p_lh,     r.crossovers.f_ucr_hl, r.crossovers.f_ucr_lh,
            r.crossovers.f_icr_hl, r.crossovers.f_icr_lh};
}

void write_report_csv(std::ostream& out, const std::vector<FullReport>& rows, const RunStamp& stamp) {
    out << "# generated_at: " << timestamp_utc() << '\n';
    out << "# config_hash: " << stamp.config_hash << '\n';
    out << "# seed: " << stamp.seed << '\n';
    const auto& cols = report_columns();
    out << "B,C_c,L_c";
    for (const auto& c : cols) out << ',' << c;
    out << '\n';
    for (const auto& r : rows) {
        out << format_number(r.gens.bandwidth_b()) << ',' << format_number(r.cable.capacitance()) << ','
            << format_number(r.cable.inductance());
        for (double v : report_values(r)) out << ',' << format_number(v);
        out << '\n';
    }
}

ordered_json stamp_json(const RunStamp& stamp) {
    ordered_json j;
    j["generated_at"] = timestamp_utc();
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    return j;
}

void write_report_json(std::ostream& out, const std::vector<FullReport>& rows, const RunStamp& stamp) {
    ordered_json doc = stamp_json(stamp);
    ordered_json arr = ordered_json::array();
    const auto& cols = report_columns();
    for (const auto& r : rows) {
        ordered_json row;
        row["B"] = r.gens.bandwidth_b();
        row["C_c"] = r.cable.capacitance();
        row["L_c"] = r.cable.inductance();
        const auto vals = report_values(r);
        for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = json_number(vals[i]);
        arr.push_back(std::move(row));
    }
    doc["reports"] = std::move(arr);
    out << doc.dump(2) << '\n';
}

ordered_json leak_json(const LeakReport& leak) {
    ordered_json j;
    j["n_trials"] = leak.n_trials;
    j["n_correct"] = leak.n_correct;
    j["p"] = leak.p;
    j["wilson_95"] = {leak.wilson_95.lo, leak.wilson_95.hi};
    j["excludes_half"] = leak.excludes_half();
    return j;
}

ordered_json verdict_json(const std::optional<AttackVerdict>& v) {
    if (!v) return nullptr;
    ordered_json j;
    j["guessed_state"] = std::string(to_string(v->guessed_state));
    j["statistic"] = json_number(v->statistic_value);
    j["margin"] = json_number(v->decision_margin);
    j["channel"] = std::string(to_string(v->channel));
    return j;
}

namespace {
ordered_json opt_number(const std::optional<double>& v) {
    return v ? json_number(*v) : ordered_json(nullptr);
}
}  // namespace

ordered_json observation_json(const EveObservation& obs) {
    ordered_json j;
    j["f_ucr_est"] = opt_number(obs.crossovers.voltage_fcr);
    j["f_icr_est"] = opt_number(obs.crossovers.current_fcr);
    j["u_c_ms"] = opt_number(obs.mean_squares.u_c_ms);
    j["i_l_ms"] = opt_number(obs.mean_squares.i_l_ms);
    return j;
}

ordered_json session_json(const SessionRecord& rec, const RunStamp& stamp, const ordered_json& config_echo) {
    ordered_json doc = stamp_json(stamp);
    doc["config"] = config_echo;
    const auto& g = rec.gens;
    doc["generators"] = {{"u_ha", g.u_ha()}, {"u_lb", g.u_lb()}, {"u_la", g.u_la()},
                         {"u_hb", g.u_hb()}, {"bandwidth_b", g.bandwidth_b()}};
    doc["sample_rate_hz"] = rec.sample_rate_hz;
    ordered_json levels;
    for (BitState s : kAllStates) {
        levels[std::string(to_string(s))] = {{"u2", rec.levels.level(s)}, {"std_error", rec.levels.error(s)}};
    }
    doc["levels"] = levels;

    ordered_json periods = ordered_json::array();
    for (const auto& p : rec.periods) {
        ordered_json j;
        j["index"] = p.index;
        j["seed"] = p.seed;
        j["true_state"] = std::string(to_string(p.true_state));
        j["measured_u_ms"] = p.measured_u_ms;
        j["alice_decoded_peer"] = std::string(to_string(p.alice_decoded_peer));
        j["bob_decoded_peer"] = std::string(to_string(p.bob_decoded_peer));
        j["secure"] = p.secure;
        j["alice_bit"] = p.alice_bit ? ordered_json(*p.alice_bit) : ordered_json(nullptr);
        j["bob_bit"] = p.bob_bit ? ordered_json(*p.bob_bit) : ordered_json(nullptr);
        if (p.eve) {
            j["eve"] = {{"observation", observation_json(*p.eve_observation)},
                        {"crossover", verdict_json(p.eve->crossover)},
                        {"temperature", verdict_json(p.eve->temperature)}};
        }
        periods.push_back(std::move(j));
    }
    doc["periods"] = std::move(periods);

    ordered_json key;
    key["alice_hex"] = key_hex(rec.alice_key);
    key["bob_hex"] = key_hex(rec.bob_key);
    key["bits"] = rec.alice_key.size();
    key["agree"] = rec.keys_agree();
    key["discarded_periods"] = rec.discard_count;
    key["decode_errors"] = rec.decode_errors;
    doc["key"] = key;

    ordered_json leak;
    leak["crossover"] = rec.crossover_leak ? leak_json(*rec.crossover_leak) : ordered_json(nullptr);
    leak["temperature"] = rec.temperature_leak ? leak_json(*rec.temperature_leak) : ordered_json(nullptr);
    doc["leak"] = leak;
    return doc;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    return out;
}

void write_json_file(const std::filesystem::path& path, const ordered_json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

}  // namespace kljn
