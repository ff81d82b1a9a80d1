#include "nomad/digest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

#include "nomad/errors.hpp"
#include "nomad/sha256.hpp"

namespace nomad {

long DigestRecord::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return long(i);
    }
    return -1;
}

IpSalt IpSalt::generate() {
    IpSalt salt;
    std::ifstream urandom("/dev/urandom", std::ios::binary);
    if (urandom.read(reinterpret_cast<char*>(salt.bytes.data()), long(salt.bytes.size()))) {
        return salt;
    }
    // Fallback: std::random_device (also the kernel CSPRNG on this platform).
    std::random_device rd;
    for (std::size_t i = 0; i < salt.bytes.size(); i += 4) {
        const std::uint32_t word = rd();
        for (std::size_t k = 0; k < 4 && i + k < salt.bytes.size(); ++k) {
            salt.bytes[i + k] = std::uint8_t(word >> (8 * k));
        }
    }
    return salt;
}

bool is_column_hash(std::string_view hex) {
    if (hex.size() != 64) return false;
    return std::all_of(hex.begin(), hex.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

std::string hash_column(const Column& column) {
    std::vector<std::uint8_t> contiguous;
    contiguous.reserve(column.cells.size() * 8);
    for (const auto& cell : column.cells) {
        const auto block = Sha256::digest(cell);
        contiguous.insert(contiguous.end(), block.begin(), block.begin() + 8);
    }
    return to_hex(Sha256::digest(contiguous.data(), contiguous.size()));
}

std::vector<std::string> hash_columns_serial(const CanonicalTable& table) {
    std::vector<std::string> hashes;
    hashes.reserve(table.columns.size());
    for (const auto& column : table.columns) {
        hashes.push_back(hash_column(column));
    }
    return hashes;
}

std::vector<std::string> hash_columns(const CanonicalTable& table) {
    const long n = long(table.columns.size());
    std::vector<std::string> hashes(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < n; ++i) {
        hashes[std::size_t(i)] = hash_column(table.columns[std::size_t(i)]);
    }
    return hashes;
}

Column pseudonymize_ips(const Column& column, const IpSalt& salt) {
    Column out;
    out.name = kIpHashColumnName;
    out.cells.reserve(column.cells.size());
    for (const auto& cell : column.cells) {
        Sha256 hasher;
        hasher.update(salt.bytes.data(), salt.bytes.size());
        hasher.update(cell);
        out.cells.push_back(to_hex(hasher.finish()));
    }
    return out;
}

namespace {

bool is_truthy_marker(std::string_view cell) {
    if (cell.size() > 4) return false;
    std::string lowered(cell);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return lowered == "1" || lowered == "true" || lowered == "yes";
}

} // namespace

std::pair<CanonicalTable, long> apply_delete_requested(const CanonicalTable& table,
                                                       const std::string& column_name) {
    const long marker_col = table.find_column(column_name);
    if (marker_col < 0) {
        throw ConfigError("delete-requested column '" + column_name + "' not found");
    }

    const long meta = table.metadata_row_count();
    const long data_rows = table.data_row_count();
    std::vector<bool> remove(std::size_t(data_rows), false);
    long removed_count = 0;
    for (long r = 0; r < data_rows; ++r) {
        if (is_truthy_marker(table.data_cell(std::size_t(marker_col), r))) {
            remove[std::size_t(r)] = true;
            ++removed_count;
        }
    }
    if (removed_count == 0) {
        return {table, 0};
    }

    CanonicalTable out;
    out.profile = table.profile;
    out.warnings = table.warnings;
    out.columns.reserve(table.columns.size());
    for (const auto& column : table.columns) {
        Column kept;
        kept.name = column.name;
        kept.cells.reserve(column.cells.size() - std::size_t(removed_count));
        for (long i = 0; i < meta; ++i) kept.cells.push_back(column.cells[std::size_t(i)]);
        for (long r = 0; r < data_rows; ++r) {
            if (!remove[std::size_t(r)]) kept.cells.push_back(column.cells[std::size_t(meta + r)]);
        }
        out.columns.push_back(std::move(kept));
    }
    return {out, removed_count};
}

DigestResult digest_table(const CanonicalTable& table, const DigestOptions& options) {
    if (options.survey_id.empty()) {
        throw ConfigError("survey id must not be empty");
    }
    if (options.ip_option && !table.profile.ip_column_name) {
        throw ConfigError("ip option requested but profile '" + table.profile.platform_id +
                          "' defines no IP column");
    }

    DigestResult result;
    result.table = table;
    long removed = 0;
    if (options.delete_requested_column) {
        std::tie(result.table, removed) =
            apply_delete_requested(result.table, *options.delete_requested_column);
    }

    if (options.ip_option) {
        const long ip_col = result.table.find_column(*table.profile.ip_column_name);
        if (ip_col < 0) {
            throw ConfigError("profile IP column '" + *table.profile.ip_column_name +
                              "' not present in table");
        }
        if (result.table.find_column(kIpHashColumnName) >= 0) {
            throw ConfigError("table already contains a column named IPHash");
        }
        const IpSalt salt = IpSalt::generate();
        result.table.columns[std::size_t(ip_col)] =
            pseudonymize_ips(result.table.columns[std::size_t(ip_col)], salt);
        // Salt goes out of scope here and is never stored anywhere.
    }

    DigestRecord& record = result.record;
    record.survey_id = options.survey_id;
    record.platform_id = table.profile.platform_id;
    record.created_at = rfc3339_utc_now();
    record.header_row_count = table.profile.header_row_count;
    record.data_row_count = result.table.data_row_count();
    record.ip_pseudonym_column =
        options.ip_option ? std::optional<std::string>(kIpHashColumnName) : std::nullopt;
    record.delete_requested_column = options.delete_requested_column;
    record.deleted_requested_row_count = removed;

    const auto hashes = hash_columns(result.table);
    record.columns.reserve(hashes.size());
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        record.columns.push_back(DigestEntry{result.table.columns[i].name, hashes[i]});
    }
    return result;
}

njson record_to_json(const DigestRecord& record) {
    njson j;
    j["format_version"] = record.format_version;
    j["survey_id"] = record.survey_id;
    j["platform_id"] = record.platform_id;
    j["created_at"] = record.created_at;
    j["tool_version"] = record.tool_version;
    j["header_row_count"] = record.header_row_count;
    j["data_row_count"] = record.data_row_count;
    j["ip_pseudonym_column"] =
        record.ip_pseudonym_column ? njson(*record.ip_pseudonym_column) : njson(nullptr);
    j["delete_requested_column"] =
        record.delete_requested_column ? njson(*record.delete_requested_column) : njson(nullptr);
    j["deleted_requested_row_count"] = record.deleted_requested_row_count;
    njson cols = njson::array();
    for (const auto& entry : record.columns) {
        cols.push_back(njson{{"name", entry.name}, {"hash", entry.hash}});
    }
    j["columns"] = std::move(cols);
    return j;
}

DigestRecord record_from_json(const njson& j) {
    try {
        DigestRecord record;
        record.format_version = j.at("format_version").get<int>();
        if (record.format_version != kDigestFormatVersion) {
            throw StructureError("unsupported digest record format version " +
                                 std::to_string(record.format_version));
        }
        record.survey_id = j.at("survey_id").get<std::string>();
        record.platform_id = j.at("platform_id").get<std::string>();
        record.created_at = j.at("created_at").get<std::string>();
        record.tool_version = j.at("tool_version").get<std::string>();
        record.header_row_count = j.at("header_row_count").get<int>();
        record.data_row_count = j.at("data_row_count").get<long>();
        if (j.contains("ip_pseudonym_column") && !j["ip_pseudonym_column"].is_null()) {
            record.ip_pseudonym_column = j["ip_pseudonym_column"].get<std::string>();
        }
        if (j.contains("delete_requested_column") && !j["delete_requested_column"].is_null()) {
            record.delete_requested_column = j["delete_requested_column"].get<std::string>();
        }
        record.deleted_requested_row_count = j.value("deleted_requested_row_count", 0L);
        for (const auto& entry : j.at("columns")) {
            DigestEntry e{entry.at("name").get<std::string>(), entry.at("hash").get<std::string>()};
            if (!is_column_hash(e.hash)) {
                throw StructureError("invalid column hash for '" + e.name + "'");
            }
            if (record.find_column(e.name) >= 0) {
                throw StructureError("duplicate column name '" + e.name + "' in record");
            }
            record.columns.push_back(std::move(e));
        }
        return record;
    } catch (const njson::exception& e) {
        throw StructureError(std::string("malformed digest record: ") + e.what());
    }
}

std::string rfc3339_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&secs, &utc);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                  utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
    return buf;
}

} // namespace nomad
