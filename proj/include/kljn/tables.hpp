#pragma once

// Regeneration of the eight published design tables and comparison against the
// embedded reference values (data/reference_tables.csv, compiled in).

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kljn/report.hpp"

namespace kljn {

/// Relative deviation above which a regenerated cell is flagged.
inline constexpr double kTableRelTol = 0.01;
/// A printed zero power is matched when |P| < this · U_LA²/R_sLH.
inline constexpr double kZeroPowerRelTol = 1e-9;

struct ReferenceValue {
    int table;
    std::string column;    // "A".."C" or a row number "1".."3"
    std::string quantity;  // report column name, e.g. "f_ucrHL"
    double value;
};

std::string_view embedded_reference_csv() noexcept;
/// Parses `table,column,quantity,value` rows; '#' lines and the header are skipped.
std::vector<ReferenceValue> parse_reference_csv(std::string_view text);

struct TableCell {
    ReferenceValue reference;
    double computed;
    /// |computed − reference| / |reference|, or for a zero reference the
    /// magnitude relative to U_LA²/R_sLH.
    double deviation;
    bool flagged;
};

/// Resistor quad behind one column of a table (fourth resistors designed
/// where the table does so). Throws Error(invalid_argument) for unknown cells.
ResistorQuad table_quad(int table, std::string_view column);

/// Every derived quantity for one table column, keyed by report column name.
/// Tables 6 and 7 list resistances only, so no generator solution is attempted there.
std::vector<std::pair<std::string, double>> table_column_values(int table, std::string_view column);

std::vector<TableCell> regenerate_tables(const std::vector<ReferenceValue>& reference);
inline std::vector<TableCell> regenerate_tables() {
    return regenerate_tables(parse_reference_csv(embedded_reference_csv()));
}

void write_tables_csv(std::ostream& out, const std::vector<TableCell>& cells, const RunStamp& stamp);

}  // namespace kljn
