#ifndef NOMAD_DIGEST_HPP
#define NOMAD_DIGEST_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nomad/csv.hpp"

namespace nomad {

using njson = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kDigestFormatVersion = 1;
inline constexpr const char* kIpHashColumnName = "IPHash";

// One name/hash pair of the stored digest.
struct DigestEntry {
    std::string name;
    std::string hash;  // 64 lowercase hex chars

    bool operator==(const DigestEntry&) const = default;
};

// The stored artifact for one survey digest. Never contains cell values.
struct DigestRecord {
    int format_version = kDigestFormatVersion;
    std::string survey_id;
    std::string platform_id;
    std::string created_at;  // RFC 3339 UTC
    std::string tool_version = kToolVersion;
    int header_row_count = 1;
    long data_row_count = 0;
    std::optional<std::string> ip_pseudonym_column;
    std::optional<std::string> delete_requested_column;
    long deleted_requested_row_count = 0;
    std::vector<DigestEntry> columns;

    long find_column(std::string_view name) const;

    bool operator==(const DigestRecord&) const = default;
};

// Ephemeral per-run salt for IP pseudonymization. Never serialized, never
// persisted, never logged; generate() draws from the system CSPRNG.
struct IpSalt {
    std::array<std::uint8_t, 32> bytes{};

    static IpSalt generate();
};

bool is_column_hash(std::string_view hex);

// Digest format version 1, the compatibility contract:
//   per cell      block  = first 8 bytes of SHA-256(cell UTF-8 bytes)
//   column bytes  concat of all cell blocks in row order
//                 (metadata rows first, then data rows; the name row is
//                 excluded — names are stored alongside the hash)
//   column hash   lowercase hex of SHA-256(column bytes)
std::string hash_column(const Column& column);

// Serial reference: hash_column over each column in order.
std::vector<std::string> hash_columns_serial(const CanonicalTable& table);

// OpenMP-parallel across columns; falls back to the serial path when built
// without OpenMP. Output is identical to hash_columns_serial for any table
// and any thread count.
std::vector<std::string> hash_columns(const CanonicalTable& table);

// Replaces every cell with lowercase hex of SHA-256(salt ‖ cell UTF-8).
// Equal inputs map to equal pseudonyms within one salt; the output column
// is named "IPHash".
Column pseudonymize_ips(const Column& column, const IpSalt& salt);

// Removes data rows whose cell in column_name is a truthy marker
// (case-insensitive "1", "true", "yes"). Metadata rows are never removed.
std::pair<CanonicalTable, long> apply_delete_requested(const CanonicalTable& table,
                                                       const std::string& column_name);

struct DigestOptions {
    std::string survey_id;
    bool ip_option = false;
    std::optional<std::string> delete_requested_column;
};

struct DigestResult {
    DigestRecord record;
    CanonicalTable table;  // post delete-requested removal and IP substitution
};

// The full digest pipeline: delete-requested removal, IP pseudonymization
// (in place of the profile's IP column), then one hash per column. The
// record carries no cell values; the returned table is what the caller
// saves locally.
DigestResult digest_table(const CanonicalTable& table, const DigestOptions& options);

njson record_to_json(const DigestRecord& record);
DigestRecord record_from_json(const njson& j);

std::string rfc3339_utc_now();

} // namespace nomad

#endif
