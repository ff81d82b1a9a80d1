#ifndef NOMAD_CSV_HPP
#define NOMAD_CSV_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nomad {

// Per-platform parsing conventions. Row 1 of an export always carries the
// column names; rows 2..header_row_count are additional header metadata
// (question text, import ids) that still belong to the column's content.
struct PlatformProfile {
    std::string platform_id;
    int header_row_count = 1;
    std::optional<std::string> status_column_name;
    std::optional<std::string> ip_column_name;
};

struct Column {
    std::string name;                // byte-for-byte from row 1, no trimming
    std::vector<std::string> cells;  // metadata rows first, then data rows

    bool operator==(const Column&) const = default;
};

class CanonicalTable {
public:
    std::vector<Column> columns;
    PlatformProfile profile;
    std::vector<std::string> warnings;  // ragged rows, duplicate names, BOM

    long metadata_row_count() const { return profile.header_row_count - 1; }
    long data_row_count() const {
        return columns.empty() ? 0 : long(columns.front().cells.size()) - metadata_row_count();
    }
    long total_row_count() const {
        return columns.empty() ? 0 : long(columns.front().cells.size()) + 1;
    }

    // Index into columns by exact name; -1 when absent.
    long find_column(std::string_view name) const;

    const std::string& data_cell(std::size_t col, long data_row) const {
        return columns[col].cells[std::size_t(metadata_row_count() + data_row)];
    }
    std::string& data_cell(std::size_t col, long data_row) {
        return columns[col].cells[std::size_t(metadata_row_count() + data_row)];
    }

    std::vector<std::string> column_names() const;

    // Equality over content: columns and header depth. Warnings are
    // diagnostics, not content.
    bool operator==(const CanonicalTable& other) const {
        return columns == other.columns &&
               profile.header_row_count == other.profile.header_row_count;
    }
};

// Parses an RFC 4180 CSV export (UTF-8) into a canonical table.
//
// Accepted record terminators are CRLF and LF; CRLF inside quoted cells is
// normalized to LF so re-downloads across platforms hash identically. Cell
// bytes are otherwise preserved exactly: no trimming, no case folding, no
// Unicode normalization. Rows shorter than the header are padded with empty
// cells (warning recorded); rows longer than the header are an error.
// Duplicate column names are disambiguated with "#2", "#3", ... suffixes.
// A leading UTF-8 BOM is stripped (warning recorded).
CanonicalTable parse_csv(std::string_view bytes, const PlatformProfile& profile);

// RFC 4180 output, CRLF record separators, minimal quoting (a cell is quoted
// iff it contains a comma, quote, CR, or LF). parse_csv(serialize_csv(t))
// reproduces t exactly for any table whose cells do not contain a literal
// CRLF sequence (parse_csv never produces one).
std::string serialize_csv(const CanonicalTable& table);

} // namespace nomad

#endif
