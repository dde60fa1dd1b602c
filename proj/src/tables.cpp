#include "kljn/tables.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "kljn/errors.hpp"

namespace kljn {

namespace {

constexpr char kReferenceCsv[] =
#include "reference_tables.inc"
    ;

constexpr double kBandwidth = 1000.0;
constexpr double kULa = 1.0;

const CableModel& table_cable() {
    static const CableModel cable{2000.0, 100e-12, 0.7e-6};
    return cable;
}

[[noreturn]] void unknown_cell(int table, std::string_view column) {
    throw Error(Errc::invalid_argument,
                "no table " + std::to_string(table) + " column '" + std::string(column) + "'");
}

int column_index(std::string_view column) {
    if (column == "A" || column == "1") return 0;
    if (column == "B" || column == "2") return 1;
    if (column == "C" || column == "3") return 2;
    return -1;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::string_view embedded_reference_csv() noexcept { return kReferenceCsv; }

std::vector<ReferenceValue> parse_reference_csv(std::string_view text) {
    std::vector<ReferenceValue> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.rfind("table,", 0) == 0) continue;
        std::vector<std::string> f;
        std::istringstream fields(line);
        for (std::string cell; std::getline(fields, cell, ',');) f.push_back(trim(cell));
        if (f.size() != 4) {
            throw Error(Errc::invalid_argument, "reference line " + std::to_string(line_no) + ": expected 4 fields");
        }
        try {
            out.push_back({std::stoi(f[0]), f[1], f[2], std::stod(f[3])});
        } catch (const std::logic_error&) {
            throw Error(Errc::invalid_argument, "reference line " + std::to_string(line_no) + ": bad number");
        }
    }
    return out;
}

ResistorQuad table_quad(int table, std::string_view column) {
    const int c = column_index(column);
    if (c < 0) unknown_cell(table, column);
    switch (table) {
        case 1: {
            static const double la[] = {1000, 500, 2000}, hb[] = {9000, 18000, 4500};
            return {9000, zero_power_fourth(hb[c], la[c], 9000), la[c], hb[c]};
        }
        case 2: case 3: case 4: case 5: {
            static const double ha[] = {9000, 10000, 5000}, lb[] = {1000, 5000, 5000};
            return {ha[c], lb[c], 1000, 9000};
        }
        case 6: {
            static const double ha[] = {2000, 1000, 10000}, la[] = {100, 200, 500}, lb[] = {90, 160, 500};
            return {ha[c], lb[c], la[c], match_parallel_fourth(ha[c], la[c], lb[c])};
        }
        case 7: {
            static const double ha[] = {2000, 1000, 10000}, la[] = {500, 200, 5000}, hb[] = {2500, 1300, 10000};
            return {ha[c], match_serial_fourth(la[c], hb[c], ha[c]), la[c], hb[c]};
        }
        case 8:
            if (c == 0) return {2000, 90, 100, match_parallel_fourth(2000, 100, 90)};
            if (c == 1) return {100, match_serial_fourth(50, 60, 100), 50, 60};
            return {10000, 1000, 1000, 10000};
        default:
            unknown_cell(table, column);
    }
}

std::vector<std::pair<std::string, double>> table_column_values(int table, std::string_view column) {
    const ResistorQuad q = table_quad(table, column);
    std::vector<std::pair<std::string, double>> out;
    if (table == 6 || table == 7) {
        const Resultants r = resultants(q);
        out = {{"R_HA", q.r_ha()},   {"R_LB", q.r_lb()},   {"R_LA", q.r_la()},   {"R_HB", q.r_hb()},
               {"R_pHL", r.r_p_hl}, {"R_pLH", r.r_p_lh}, {"R_sHL", r.r_s_hl}, {"R_sLH", r.r_s_lh}};
        return out;
    }
    const FullReport rep = full_report(q, kULa, table_cable(), kBandwidth);
    const auto& cols = report_columns();
    const auto vals = report_values(rep);
    for (std::size_t i = 0; i < cols.size(); ++i) out.emplace_back(cols[i], vals[i]);
    return out;
}

std::vector<TableCell> regenerate_tables(const std::vector<ReferenceValue>& reference) {
    std::map<std::pair<int, std::string>, std::map<std::string, double>> cache;
    std::vector<TableCell> cells;
    cells.reserve(reference.size());
    for (const auto& ref : reference) {
        auto key = std::make_pair(ref.table, ref.column);
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto vals = table_column_values(ref.table, ref.column);
            it = cache.emplace(key, std::map<std::string, double>(vals.begin(), vals.end())).first;
        }
        const auto& vals = it->second;
        const auto v = vals.find(ref.quantity);
        if (v == vals.end()) {
            throw Error(Errc::invalid_argument, "table " + std::to_string(ref.table) + " has no quantity '" +
                                                    ref.quantity + "'");
        }
        TableCell cell{ref, v->second, 0.0, false};
        if (ref.value == 0.0) {
            const double scale = kULa * kULa / vals.at("R_sLH");
            cell.deviation = std::abs(cell.computed) / scale;
            cell.flagged = !(cell.deviation < kZeroPowerRelTol);
        } else {
            cell.deviation = std::abs(cell.computed - ref.value) / std::abs(ref.value);
            cell.flagged = !(cell.deviation <= kTableRelTol);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

void write_tables_csv(std::ostream& out, const std::vector<TableCell>& cells, const RunStamp& stamp) {
    out << "# generated_at: " << timestamp_utc() << '\n';
    out << "# config_hash: " << stamp.config_hash << '\n';
    out << "# seed: " << stamp.seed << '\n';
    out << "table,column,quantity,computed,reference,deviation,flag\n";
    for (const auto& c : cells) {
        out << c.reference.table << ',' << c.reference.column << ',' << c.reference.quantity << ','
            << format_number(c.computed) << ',' << format_number(c.reference.value) << ','
            << format_number(c.deviation) << ',' << (c.flagged ? "DEVIATES" : "ok") << '\n';
    }
}

}  // namespace kljn
