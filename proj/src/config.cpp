#include "kljn/config.hpp"

#include <cstdio>
#include <fstream>

#include "kljn/errors.hpp"

namespace kljn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

ResistorQuad quad_from(const json& j) {
    return {j.at("r_ha").get<double>(), j.at("r_lb").get<double>(), j.at("r_la").get<double>(),
            j.at("r_hb").get<double>()};
}

CableModel cable_from(const json& j, const CableModel& fallback) {
    return {get_or(j, "length_m", fallback.length_m()), get_or(j, "cap_per_m", fallback.cap_per_m()),
            get_or(j, "ind_per_m", fallback.ind_per_m())};
}

ordered_json quad_to(const ResistorQuad& q) {
    ordered_json j;
    j["r_ha"] = q.r_ha();
    j["r_lb"] = q.r_lb();
    j["r_la"] = q.r_la();
    j["r_hb"] = q.r_hb();
    return j;
}

ordered_json cable_to(const CableModel& c) {
    ordered_json j;
    j["length_m"] = c.length_m();
    j["cap_per_m"] = c.cap_per_m();
    j["ind_per_m"] = c.ind_per_m();
    return j;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    try {
        RunConfig cfg;
        if (j.contains("quad")) cfg.quad = quad_from(j.at("quad"));
        cfg.u_la = get_or(j, "u_la", cfg.u_la);
        cfg.bandwidth_b = get_or(j, "bandwidth_b", cfg.bandwidth_b);
        if (j.contains("cable")) cfg.cable = cable_from(j.at("cable"), cfg.cable);
        cfg.frequency_scale = get_or(j, "frequency_scale", cfg.frequency_scale);
        cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
        cfg.threads = get_or(j, "threads", cfg.threads);
        if (j.contains("welch")) {
            const auto& w = j.at("welch");
            cfg.welch.segment_len = get_or(w, "segment_len", cfg.welch.segment_len);
            cfg.welch.overlap_fraction = get_or(w, "overlap_fraction", cfg.welch.overlap_fraction);
        }
        cfg.eval_points = get_or(j, "eval_points", cfg.eval_points);
        if (j.contains("session")) {
            const auto& s = j.at("session");
            auto& out = cfg.session;
            out.n_bit_periods = get_or(s, "n_bit_periods", out.n_bit_periods);
            out.duration_s = get_or(s, "duration_s", out.duration_s);
            out.sample_rate_hz = get_or(s, "sample_rate_hz", out.sample_rate_hz);
            if (s.contains("mode")) out.mode = parse_session_mode(s.at("mode").get<std::string>());
            if (s.contains("one_state")) out.one_state = parse_state(s.at("one_state").get<std::string>());
            out.eve = get_or(s, "eve", out.eve);
        }
        if (j.contains("campaign")) {
            const auto& c = j.at("campaign");
            auto& out = cfg.campaign;
            out.trials = get_or(c, "trials", out.trials);
            out.duration_s = get_or(c, "duration_s", out.duration_s);
            out.sample_rate_hz = get_or(c, "sample_rate_hz", out.sample_rate_hz);
            if (c.contains("quads"))
                for (const auto& q : c.at("quads")) out.quads.push_back(quad_from(q));
            if (c.contains("bandwidths"))
                for (const auto& b : c.at("bandwidths")) out.bandwidths.push_back(b.get<double>());
            if (c.contains("cables"))
                for (const auto& cb : c.at("cables")) out.cables.push_back(cable_from(cb, cfg.cable));
        }
        if (!(cfg.u_la > 0.0)) throw Error(Errc::invalid_argument, "u_la must be > 0");
        if (!(cfg.bandwidth_b > 0.0)) throw Error(Errc::invalid_argument, "bandwidth_b must be > 0");
        if (!(cfg.frequency_scale > 0.0)) throw Error(Errc::invalid_argument, "frequency_scale must be > 0");
        return cfg;
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open config " + path.string());
    try {
        return config_from_json(json::parse(in, nullptr, true, /*ignore_comments=*/true));
    } catch (const json::parse_error& e) {
        throw Error(Errc::invalid_argument, "config " + path.string() + ": " + e.what());
    }
}

ordered_json config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["quad"] = quad_to(cfg.quad);
    j["u_la"] = cfg.u_la;
    j["bandwidth_b"] = cfg.bandwidth_b;
    j["cable"] = cable_to(cfg.cable);
    j["frequency_scale"] = cfg.frequency_scale;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["welch"] = {{"segment_len", cfg.welch.segment_len},
                  {"overlap_fraction", cfg.welch.overlap_fraction}};
    j["eval_points"] = cfg.eval_points;
    ordered_json s;
    s["n_bit_periods"] = cfg.session.n_bit_periods;
    s["duration_s"] = cfg.session.duration_s;
    s["sample_rate_hz"] = cfg.session.sample_rate_hz;
    s["mode"] = std::string(to_string(cfg.session.mode));
    s["one_state"] = std::string(to_string(cfg.session.one_state));
    s["eve"] = cfg.session.eve;
    j["session"] = s;
    ordered_json c;
    c["trials"] = cfg.campaign.trials;
    c["duration_s"] = cfg.campaign.duration_s;
    c["sample_rate_hz"] = cfg.campaign.sample_rate_hz;
    c["quads"] = ordered_json::array();
    for (const auto& q : cfg.campaign.quads) c["quads"].push_back(quad_to(q));
    c["bandwidths"] = cfg.campaign.bandwidths;
    c["cables"] = ordered_json::array();
    for (const auto& cb : cfg.campaign.cables) c["cables"].push_back(cable_to(cb));
    j["campaign"] = c;
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    // Threads do not affect results, so they are excluded from the hash.
    auto j = config_to_json(cfg);
    j.erase("threads");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig apply_frequency_scale(const RunConfig& cfg) {
    const double s = cfg.frequency_scale;
    if (s == 1.0) return cfg;
    RunConfig out = cfg;
    out.frequency_scale = 1.0;
    out.cable = cfg.cable.frequency_scaled(s);
    out.bandwidth_b = cfg.bandwidth_b / s;
    out.session.duration_s = cfg.session.duration_s * s;
    out.session.sample_rate_hz = cfg.session.sample_rate_hz / s;
    out.campaign.duration_s = cfg.campaign.duration_s * s;
    out.campaign.sample_rate_hz = cfg.campaign.sample_rate_hz / s;
    for (auto& b : out.campaign.bandwidths) b /= s;
    for (auto& c : out.campaign.cables) c = c.frequency_scaled(s);
    return out;
}

EveOptions eve_options(const RunConfig& cfg) {
    return {cfg.welch.segment_len, cfg.welch.overlap_fraction, cfg.eval_points};
}

SessionConfig session_config(const RunConfig& raw) {
    const RunConfig cfg = apply_frequency_scale(raw);
    SessionConfig s;
    s.quad = cfg.quad;
    s.u_la = cfg.u_la;
    s.cable = cfg.cable;
    s.bandwidth_b = cfg.bandwidth_b;
    s.duration_s = cfg.session.duration_s;
    s.sample_rate_hz = cfg.session.sample_rate_hz;
    s.n_bit_periods = cfg.session.n_bit_periods;
    s.master_seed = cfg.seed;
    s.one_state = cfg.session.one_state;
    s.mode = cfg.session.mode;
    s.eve_enabled = cfg.session.eve;
    s.eve = eve_options(cfg);
    s.threads = cfg.threads;
    return s;
}

}  // namespace kljn
