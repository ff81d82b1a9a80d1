#ifndef NOMAD_PROFILES_HPP
#define NOMAD_PROFILES_HPP

#include <filesystem>
#include <string_view>
#include <vector>

#include "nomad/csv.hpp"

namespace nomad {

// Built-in platform registry:
//   qualtrics  — 3 header rows (names, question text, import ids),
//                status column "Status", IP column "IPAddress"
//   surveycto  — 1 header row, no status/IP conventions
//   local      — 1 header row by default, fully overridable
PlatformProfile builtin_profile(std::string_view platform_id);

std::vector<std::string> builtin_platform_ids();

// Override file: one "key = value" pair per line, '#' comments.
// Keys: platform_id, header_row_count, status_column_name, ip_column_name.
// Unset optional keys stay unset; an empty value clears them.
PlatformProfile load_profile_file(const std::filesystem::path& path);

PlatformProfile parse_profile_text(std::string_view text);

} // namespace nomad

#endif
