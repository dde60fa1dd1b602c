#pragma once

// Attack campaigns: many independent secure bit periods (HL or LH by a fair
// coin) per grid point, each attacked by the eavesdropper, with leak
// statistics per point. Results depend only on the master seed, never on the
// thread count.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "kljn/attacks.hpp"
#include "kljn/circuit.hpp"
#include "kljn/protocol.hpp"
#include "kljn/report.hpp"

namespace kljn {

struct CampaignPoint {
    ResistorQuad quad;
    double bandwidth_b;
    CableModel cable;
};

/// Cartesian product, quad-major then bandwidth then cable.
std::vector<CampaignPoint> campaign_grid(const std::vector<ResistorQuad>& quads,
                                         const std::vector<double>& bandwidths,
                                         const std::vector<CableModel>& cables);

struct AttackCampaign {
    std::vector<CampaignPoint> points;
    double u_la = 1.0;
    std::size_t trials = 200;
    double duration_s = 0.5;
    double sample_rate_hz = 0.0;  // 0 = minimum admissible rate per point
    std::uint64_t master_seed = 1;
    EveOptions eve;
    SessionMode mode = SessionMode::monte_carlo;
    unsigned threads = 1;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    BitState true_state = BitState::HL;
    EveObservation observation;
    EveVerdicts verdicts;
};

struct PointResult {
    std::size_t index = 0;
    CampaignPoint point;
    GeneratorSet gens;
    double sample_rate_hz = 0.0;  // 0 in analytic mode
    std::vector<TrialRecord> trials;
    LeakReport crossover;
    LeakReport temperature;
    std::size_t crossover_withheld = 0;
    std::size_t temperature_withheld = 0;
};

/// Seeds: point p uses derive_seed(master, p); its trial i uses
/// derive_seed(point seed, i).
std::vector<PointResult> run_campaign(const AttackCampaign& campaign);

nlohmann::ordered_json trial_json(const TrialRecord& t);

/// Writes trials_<p>.jsonl (stamp header line, then one trial per line) for
/// every point and summary.csv with one row per point and attack, in point
/// order. Returns the summary path.
std::filesystem::path write_campaign(const std::filesystem::path& dir,
                                     const std::vector<PointResult>& results, const RunStamp& stamp);

}  // namespace kljn
