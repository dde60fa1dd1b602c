#pragma once

// Declarative run configuration (JSON). Schema, all keys optional unless noted:
//
//   {
//     "quad":  {"r_ha": 9000, "r_lb": 1000, "r_la": 1000, "r_hb": 9000},
//     "u_la": 1.0,                      // volts, freely chosen generator
//     "bandwidth_b": 1000.0,            // hertz
//     "cable": {"length_m": 2000, "cap_per_m": 1e-10, "ind_per_m": 7e-7},
//     "frequency_scale": 1.0,           // >1 multiplies C, L and durations, divides B and fs
//     "seed": 1,
//     "threads": 1,                     // 0 = hardware concurrency
//     "welch": {"segment_len": 4096, "overlap_fraction": 0.5},
//     "eval_points": 8,
//     "session": {"n_bit_periods": 100, "duration_s": 0.1, "sample_rate_hz": 0,
//                 "mode": "analytic" | "monte_carlo", "one_state": "HL" | "LH",
//                 "eve": false},
//     "campaign": {"trials": 200, "duration_s": 0.5, "sample_rate_hz": 0,
//                  "quads": [{...}], "bandwidths": [...], "cables": [{...}]}
//   }
//
// Campaign grids default to the single top-level quad / bandwidth / cable.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "kljn/circuit.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

struct WelchConfig {
    std::size_t segment_len = 4096;
    double overlap_fraction = 0.5;
};

struct SessionSection {
    std::size_t n_bit_periods = 100;
    double duration_s = 0.1;
    double sample_rate_hz = 0.0;
    SessionMode mode = SessionMode::analytic;
    BitState one_state = BitState::HL;
    bool eve = false;
};

struct CampaignSection {
    std::size_t trials = 200;
    double duration_s = 0.5;
    double sample_rate_hz = 0.0;
    std::vector<ResistorQuad> quads;
    std::vector<double> bandwidths;
    std::vector<CableModel> cables;
};

struct RunConfig {
    ResistorQuad quad{9000, 1000, 1000, 9000};
    double u_la = 1.0;
    double bandwidth_b = 1000.0;
    CableModel cable{2000, 100e-12, 0.7e-6};
    double frequency_scale = 1.0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    WelchConfig welch;
    std::size_t eval_points = 8;
    SessionSection session;
    CampaignSection campaign;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical form with every field present; the input to config_hash().
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
/// 16 hex digits of FNV-1a-64 over the canonical JSON dump.
std::string config_hash(const RunConfig& cfg);

/// Returns a copy with the frequency scale folded in: C and L multiplied by
/// s, B and sample rates divided by s, durations multiplied by s. Every
/// dimensionless ratio (B/f_cr, fs/B, B·T) is unchanged. The result has
/// frequency_scale = 1.
RunConfig apply_frequency_scale(const RunConfig& cfg);

SessionConfig session_config(const RunConfig& cfg);
EveOptions eve_options(const RunConfig& cfg);

}  // namespace kljn
