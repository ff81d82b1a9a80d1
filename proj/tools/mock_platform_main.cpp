// Stand-alone mock survey platform for demos and manual testing. Fixtures
// come from a directory: <survey_id>.csv is served as the unedited export,
// <survey_id>.edited.csv (when present) as the in-platform-edited view.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nomad/mock_platform.hpp"

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mock survey platform serving the documented export protocol"};
    std::string fixture_dir;
    nomad::MockPlatformServer::Config config;
    app.add_option("--fixtures", fixture_dir, "Directory of <survey_id>.csv fixtures")
        ->required();
    app.add_option("--token", config.api_token, "Expected X-API-TOKEN value");
    app.add_option("--username", config.username, "Expected basic-auth user");
    app.add_option("--password", config.password, "Expected basic-auth password");
    app.add_option("--polls", config.polls_until_complete,
                   "In-progress polls before an export job completes");
    CLI11_PARSE(app, argc, argv);

    std::map<std::string, nomad::MockFixture> fixtures;
    for (const auto& entry : std::filesystem::directory_iterator(fixture_dir)) {
        const auto path = entry.path();
        if (path.extension() != ".csv" || path.stem().extension() == ".edited") continue;
        nomad::MockFixture fixture;
        fixture.original_csv = slurp(path);
        const auto edited = path.parent_path() / (path.stem().string() + ".edited.csv");
        fixture.edited_csv =
            std::filesystem::exists(edited) ? slurp(edited) : fixture.original_csv;
        fixtures[path.stem().string()] = std::move(fixture);
    }
    if (fixtures.empty()) {
        std::cerr << "no *.csv fixtures found in " << fixture_dir << "\n";
        return 2;
    }

    std::vector<std::string> ids;
    for (const auto& [id, fixture] : fixtures) ids.push_back(id);

    nomad::MockPlatformServer server(config, std::move(fixtures));
    std::cout << "mock platform listening at " << server.base_url() << "\n";
    for (const auto& id : ids) {
        std::cout << "  survey " << id << "\n";
    }
    std::cout << "Ctrl-C to stop" << std::endl;
    ::pause();
    return 0;
}
