#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kljn {

enum class Errc {
    invalid_argument = 1,
    unphysical_quad,
    infeasible_match,
    degenerate_cable,
    bandwidth_exceeds_nyquist,
    segment_too_long,
    no_usable_points,
    indistinguishable_hypotheses,
    ambiguous_levels,
    io_error,
};

constexpr std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::unphysical_quad: return "UnphysicalQuad";
        case Errc::infeasible_match: return "InfeasibleMatch";
        case Errc::degenerate_cable: return "DegenerateCable";
        case Errc::bandwidth_exceeds_nyquist: return "BandwidthExceedsNyquist";
        case Errc::segment_too_long: return "SegmentTooLong";
        case Errc::no_usable_points: return "NoUsablePoints";
        case Errc::indistinguishable_hypotheses: return "IndistinguishableHypotheses";
        case Errc::ambiguous_levels: return "AmbiguousLevels";
        case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// All library failures surface as this exception; code() identifies the kind.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace kljn
