#include "kljn/campaign.hpp"

#include <array>
#include <optional>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/noise_sim.hpp"
#include "kljn/parallel.hpp"
#include "kljn/rng.hpp"

namespace kljn {

namespace {

constexpr std::uint64_t kWaveformStream = 7;
constexpr std::array<BitState, 2> kSecureStates{BitState::HL, BitState::LH};

struct PointSetup {
    GeneratorSet gens;
    SpectralSummary spectral;
    TemperaturePredictions temps;
    std::optional<SimulationGrid> grid;
};

PointSetup prepare(const CampaignPoint& pt, const AttackCampaign& c) {
    const GeneratorSet gens = vmg_solve(pt.quad, c.u_la, pt.bandwidth_b);
    PointSetup s{gens, spectral_summary(pt.quad, gens, pt.cable),
                 temperature_predictions(pt.quad, gens, pt.cable), std::nullopt};
    if (c.mode == SessionMode::monte_carlo) {
        const double fs = c.sample_rate_hz > 0.0
                              ? c.sample_rate_hz
                              : minimum_sample_rate(pt.quad, pt.cable, pt.bandwidth_b, kSecureStates);
        s.grid.emplace(fs, c.duration_s);
        s.grid->require_resolves(pt.bandwidth_b, max_finite_crossover(pt.quad, pt.cable, kSecureStates));
    }
    return s;
}

}  // namespace

std::vector<CampaignPoint> campaign_grid(const std::vector<ResistorQuad>& quads,
                                         const std::vector<double>& bandwidths,
                                         const std::vector<CableModel>& cables) {
    std::vector<CampaignPoint> out;
    out.reserve(quads.size() * bandwidths.size() * cables.size());
    for (const auto& q : quads)
        for (double b : bandwidths)
            for (const auto& c : cables) out.push_back({q, b, c});
    return out;
}

std::vector<PointResult> run_campaign(const AttackCampaign& c) {
    if (c.points.empty()) throw Error(Errc::invalid_argument, "campaign has no grid points");
    if (c.trials < 1) throw Error(Errc::invalid_argument, "campaign needs >= 1 trial per point");

    std::vector<PointSetup> setups;
    setups.reserve(c.points.size());
    std::vector<PointResult> results(c.points.size(),
                                     PointResult{0, c.points.front(), GeneratorSet{1, 1, 1, 1, 1}, 0.0,
                                                 {}, {}, {}, 0, 0});
    for (std::size_t p = 0; p < c.points.size(); ++p) {
        setups.push_back(prepare(c.points[p], c));
        auto& r = results[p];
        r.index = p;
        r.point = c.points[p];
        r.gens = setups.back().gens;
        r.sample_rate_hz = setups.back().grid ? setups.back().grid->sample_rate_hz() : 0.0;
        r.trials.resize(c.trials);
    }

    parallel_for(c.points.size() * c.trials, c.threads, [&](std::size_t flat) {
        const std::size_t p = flat / c.trials;
        const std::size_t i = flat % c.trials;
        const CampaignPoint& pt = c.points[p];
        const PointSetup& s = setups[p];
        TrialRecord& t = results[p].trials[i];
        t.seed = derive_seed(derive_seed(c.master_seed, p), i);
        t.true_state = Rng(t.seed).coin() ? BitState::HL : BitState::LH;
        if (s.grid) {
            const auto wave = simulate_bit_period(t.true_state, pt.quad, s.gens, pt.cable, *s.grid,
                                                  derive_seed(t.seed, kWaveformStream));
            t.observation = observe_waveforms(wave, s.spectral, pt.bandwidth_b, c.eve);
        } else {
            t.observation = observe_analytic(pt.quad, s.gens, pt.cable, t.true_state);
        }
        t.verdicts = run_attacks(t.observation, s.spectral, s.temps);
    });

    for (auto& r : results) {
        std::vector<TrialOutcome> xo, temp;
        xo.reserve(r.trials.size());
        temp.reserve(r.trials.size());
        for (const auto& t : r.trials) {
            xo.push_back({t.seed, t.true_state, t.verdicts.crossover});
            temp.push_back({t.seed, t.true_state, t.verdicts.temperature});
            if (!t.verdicts.crossover) ++r.crossover_withheld;
            if (!t.verdicts.temperature) ++r.temperature_withheld;
        }
        r.crossover = leak_estimate(xo);
        r.temperature = leak_estimate(temp);
    }
    return results;
}

nlohmann::ordered_json trial_json(const TrialRecord& t) {
    nlohmann::ordered_json j;
    j["seed"] = t.seed;
    j["true_state"] = std::string(to_string(t.true_state));
    j["observation"] = observation_json(t.observation);
    j["crossover"] = verdict_json(t.verdicts.crossover);
    j["temperature"] = verdict_json(t.verdicts.temperature);
    return j;
}

std::filesystem::path write_campaign(const std::filesystem::path& dir,
                                     const std::vector<PointResult>& results, const RunStamp& stamp) {
    for (const auto& r : results) {
        auto out = open_output(dir / ("trials_" + std::to_string(r.index) + ".jsonl"));
        out << stamp_json(stamp).dump() << '\n';
        for (const auto& t : r.trials) out << trial_json(t).dump() << '\n';
        if (!out) throw Error(Errc::io_error, "write failed in " + dir.string());
    }

    const auto summary_path = dir / "summary.csv";
    auto out = open_output(summary_path);
    out << "# generated_at: " << timestamp_utc() << '\n';
    out << "# config_hash: " << stamp.config_hash << '\n';
    out << "# seed: " << stamp.seed << '\n';
    out << "point,R_HA,R_LB,R_LA,R_HB,B,C_c,L_c,sample_rate_hz,attack,n_trials,n_correct,n_withheld,"
           "p,wilson_lo,wilson_hi,excludes_half\n";
    for (const auto& r : results) {
        const auto& q = r.point.quad;
        auto row = [&](const char* attack, const LeakReport& leak, std::size_t withheld) {
            out << r.index << ',' << format_number(q.r_ha()) << ',' << format_number(q.r_lb()) << ','
                << format_number(q.r_la()) << ',' << format_number(q.r_hb()) << ','
                << format_number(r.point.bandwidth_b) << ',' << format_number(r.point.cable.capacitance())
                << ',' << format_number(r.point.cable.inductance()) << ',' << format_number(r.sample_rate_hz)
                << ',' << attack << ',' << leak.n_trials << ',' << leak.n_correct << ',' << withheld << ','
                << format_number(leak.p) << ',' << format_number(leak.wilson_95.lo) << ','
                << format_number(leak.wilson_95.hi) << ',' << (leak.excludes_half() ? 1 : 0) << '\n';
        };
        row("crossover", r.crossover, r.crossover_withheld);
        row("temperature", r.temperature, r.temperature_withheld);
    }
    if (!out) throw Error(Errc::io_error, "write failed for " + summary_path.string());
    return summary_path;
}

}  // namespace kljn
