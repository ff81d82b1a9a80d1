#include "nomad/profiles.hpp"

#include <fstream>
#include <sstream>

#include "nomad/errors.hpp"

namespace nomad {

PlatformProfile builtin_profile(std::string_view platform_id) {
    if (platform_id == "qualtrics") {
        return PlatformProfile{"qualtrics", 3, "Status", "IPAddress"};
    }
    if (platform_id == "surveycto") {
        return PlatformProfile{"surveycto", 1, std::nullopt, std::nullopt};
    }
    if (platform_id == "local") {
        return PlatformProfile{"local", 1, std::nullopt, std::nullopt};
    }
    throw ConfigError("unknown platform id '" + std::string(platform_id) + "'");
}

std::vector<std::string> builtin_platform_ids() {
    return {"qualtrics", "surveycto", "local"};
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

PlatformProfile parse_profile_text(std::string_view text) {
    PlatformProfile profile{"local", 1, std::nullopt, std::nullopt};
    bool saw_platform = false;

    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("profile file line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key == "platform_id") {
            profile.platform_id = value;
            saw_platform = true;
        } else if (key == "header_row_count") {
            try {
                profile.header_row_count = std::stoi(value);
            } catch (const std::exception&) {
                throw ConfigError("profile file line " + std::to_string(line_no) +
                                  ": header_row_count must be an integer");
            }
            if (profile.header_row_count < 1) {
                throw ConfigError("header_row_count must be >= 1");
            }
        } else if (key == "status_column_name") {
            profile.status_column_name =
                value.empty() ? std::nullopt : std::optional<std::string>(value);
        } else if (key == "ip_column_name") {
            profile.ip_column_name =
                value.empty() ? std::nullopt : std::optional<std::string>(value);
        } else {
            throw ConfigError("profile file line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
    }
    if (!saw_platform) {
        throw ConfigError("profile file must set platform_id");
    }
    return profile;
}

PlatformProfile load_profile_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open profile file " + path.string());
    }
    std::ostringstream content;
    content << in.rdbuf();
    return parse_profile_text(content.str());
}

} // namespace nomad
