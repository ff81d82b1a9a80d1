#include "nomad/csv.hpp"

#include <algorithm>
#include <unordered_set>

#include "nomad/errors.hpp"

namespace nomad {

namespace {

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        const auto b0 = std::uint8_t(bytes[i]);
        if (b0 < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t cp;
        if ((b0 & 0xe0) == 0xc0) {
            len = 2;
            cp = b0 & 0x1f;
        } else if ((b0 & 0xf0) == 0xe0) {
            len = 3;
            cp = b0 & 0x0f;
        } else if ((b0 & 0xf8) == 0xf0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            const auto bk = std::uint8_t(bytes[i + k]);
            if ((bk & 0xc0) != 0x80) return i;
            cp = (cp << 6) | (bk & 0x3f);
        }
        // Overlong encodings, surrogates, and out-of-range code points.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xd800 && cp <= 0xdfff) || cp > 0x10ffff) {
            return i;
        }
        i += len;
    }
    return std::string_view::npos;
}

struct RawRecords {
    std::vector<std::vector<std::string>> rows;
};

// RFC 4180 state machine. Record numbers in errors are 1-based physical
// records (a quoted cell spanning lines still counts as one record).
RawRecords split_records(std::string_view text) {
    RawRecords out;
    std::vector<std::string> row;
    std::string field;
    enum class State { field_start, unquoted, quoted, quote_seen };
    State state = State::field_start;
    std::size_t record_number = 1;
    bool record_has_content = false;  // anything consumed for the current record

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        out.rows.push_back(std::move(row));
        row.clear();
        state = State::field_start;
        record_has_content = false;
        ++record_number;
    };

    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        switch (state) {
        case State::field_start:
            if (c == '"') {
                state = State::quoted;
                record_has_content = true;
            } else if (c == ',') {
                end_field();
                record_has_content = true;
            } else if (c == '\n') {
                end_record();
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                ++i;
                end_record();
            } else {
                field.push_back(c);
                state = State::unquoted;
                record_has_content = true;
            }
            break;
        case State::unquoted:
            if (c == ',') {
                end_field();
                state = State::field_start;
            } else if (c == '\n') {
                end_record();
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                ++i;
                end_record();
            } else {
                field.push_back(c);
            }
            break;
        case State::quoted:
            if (c == '"') {
                state = State::quote_seen;
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                // Embedded CRLF normalized to LF.
                field.push_back('\n');
                ++i;
            } else {
                field.push_back(c);
            }
            break;
        case State::quote_seen:
            if (c == '"') {
                field.push_back('"');
                state = State::quoted;
            } else if (c == ',') {
                end_field();
                state = State::field_start;
            } else if (c == '\n') {
                end_record();
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                ++i;
                end_record();
            } else {
                throw ParseError("row " + std::to_string(record_number) +
                                 ": unexpected character after closing quote");
            }
            break;
        }
        ++i;
    }

    if (state == State::quoted) {
        throw ParseError("row " + std::to_string(record_number) + ": unbalanced quotes");
    }
    // Final record without a trailing newline. A trailing newline leaves an
    // empty, contentless record that is not emitted.
    if (record_has_content || !row.empty()) {
        end_field();
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace

long CanonicalTable::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return long(i);
    }
    return -1;
}

std::vector<std::string> CanonicalTable::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const auto& c : columns) names.push_back(c.name);
    return names;
}

CanonicalTable parse_csv(std::string_view bytes, const PlatformProfile& profile) {
    if (profile.header_row_count < 1) {
        throw ConfigError("profile header_row_count must be >= 1");
    }

    CanonicalTable table;
    table.profile = profile;

    if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xef\xbb\xbf") {
        bytes.remove_prefix(3);
        table.warnings.push_back("leading UTF-8 byte order mark stripped");
    }

    if (auto pos = find_invalid_utf8(bytes); pos != std::string_view::npos) {
        throw EncodingError("invalid UTF-8 at byte offset " + std::to_string(pos));
    }

    RawRecords raw = split_records(bytes);
    if (long(raw.rows.size()) < profile.header_row_count) {
        throw StructureError("file has " + std::to_string(raw.rows.size()) +
                             " row(s) but the profile requires at least " +
                             std::to_string(profile.header_row_count) + " header row(s)");
    }

    const auto& names_row = raw.rows.front();
    const std::size_t column_count = names_row.size();

    // Disambiguate duplicate names in file order: "#2", "#3", ... and keep
    // bumping if a suffixed name is itself taken.
    std::unordered_set<std::string> seen;
    table.columns.reserve(column_count);
    for (const auto& raw_name : names_row) {
        std::string name = raw_name;
        if (seen.count(name)) {
            int suffix = 2;
            std::string candidate;
            do {
                candidate = raw_name + "#" + std::to_string(suffix++);
            } while (seen.count(candidate));
            table.warnings.push_back("duplicate column name '" + raw_name + "' renamed to '" +
                                     candidate + "'");
            name = std::move(candidate);
        }
        seen.insert(name);
        table.columns.push_back(Column{name, {}});
    }

    const std::size_t row_total = raw.rows.size() - 1;
    for (auto& col : table.columns) col.cells.reserve(row_total);

    for (std::size_t r = 1; r < raw.rows.size(); ++r) {
        auto& row = raw.rows[r];
        if (row.size() > column_count) {
            throw ParseError("row " + std::to_string(r + 1) + " has " +
                             std::to_string(row.size()) + " fields; header has " +
                             std::to_string(column_count));
        }
        if (row.size() < column_count) {
            table.warnings.push_back("row " + std::to_string(r + 1) + " has " +
                                     std::to_string(row.size()) + " fields; padded to " +
                                     std::to_string(column_count));
            row.resize(column_count);
        }
        for (std::size_t c = 0; c < column_count; ++c) {
            table.columns[c].cells.push_back(std::move(row[c]));
        }
    }

    return table;
}

std::string serialize_csv(const CanonicalTable& table) {
    for (const auto& col : table.columns) {
        if (col.cells.size() != table.columns.front().cells.size()) {
            throw StructureError("column '" + col.name + "' has inconsistent cell count");
        }
    }

    auto needs_quoting = [](std::string_view cell) {
        return cell.find_first_of(",\"\r\n") != std::string_view::npos;
    };
    auto emit_field = [&](std::string& out, std::string_view cell) {
        if (!needs_quoting(cell)) {
            out.append(cell);
            return;
        }
        out.push_back('"');
        for (char c : cell) {
            if (c == '"') out.push_back('"');
            out.push_back(c);
        }
        out.push_back('"');
    };

    std::string out;
    const std::size_t cols = table.columns.size();
    for (std::size_t c = 0; c < cols; ++c) {
        if (c) out.push_back(',');
        emit_field(out, table.columns[c].name);
    }
    out.append("\r\n");

    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().cells.size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out.push_back(',');
            emit_field(out, table.columns[c].cells[r]);
        }
        out.append("\r\n");
    }
    return out;
}

} // namespace nomad
