#pragma once

// Serialization of results. Every output file carries the configuration hash
// and the master seed; the wall-clock timestamp sits alone on one line (a
// "# generated_at:" comment in CSV, the "generated_at" key in JSON) so that two
// runs can be compared byte-for-byte after dropping that line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "kljn/circuit.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

struct RunStamp {
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// ISO-8601 UTC time of now, or of $SOURCE_DATE_EPOCH when that is set.
std::string timestamp_utc();

/// Shortest round-trippable decimal form; "inf" / "-inf" / "nan" for
/// non-finite values.
std::string format_number(double v);
/// JSON number, or the string "inf" / "-inf" for infinities (JSON has none).
nlohmann::ordered_json json_number(double v);

/// Fixed column order of a design report, one value per column.
const std::vector<std::string>& report_columns();
std::vector<double> report_values(const FullReport& r);

void write_report_csv(std::ostream& out, const std::vector<FullReport>& rows, const RunStamp& stamp);
void write_report_json(std::ostream& out, const std::vector<FullReport>& rows, const RunStamp& stamp);

nlohmann::ordered_json leak_json(const LeakReport& leak);
nlohmann::ordered_json verdict_json(const std::optional<AttackVerdict>& v);
nlohmann::ordered_json observation_json(const EveObservation& obs);

/// Session result: configuration echo, per-period records, keys, leak summary.
nlohmann::ordered_json session_json(const SessionRecord& rec, const RunStamp& stamp,
                                    const nlohmann::ordered_json& config_echo);

/// Header object opening every JSON document: timestamp, hash, seed.
nlohmann::ordered_json stamp_json(const RunStamp& stamp);

/// Writes `doc` pretty-printed with a trailing newline; throws Error(io_error).
void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
/// Opens `path` for writing, creating parent directories; throws Error(io_error).
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace kljn
