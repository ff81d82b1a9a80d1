#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include <json.hpp>

#include "paper_example.hpp"
#include "test_helpers.hpp"

// NOMAD_CLI_PATH is injected by CMake and points at the built binary.

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const helpers::TempDir& dir, const std::string& args) {
    const auto out_path = dir.file("cli.out");
    const auto err_path = dir.file("cli.err");
    const std::string command = std::string(NOMAD_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = helpers::read_file(out_path);
    result.err = helpers::read_file(err_path);
    return result;
}

} // namespace

TEST_CASE("digest and verify round trip through the CLI") {
    helpers::TempDir dir("cli");
    const auto csv_path = dir.file("raw.csv");
    helpers::write_file(csv_path, "name,color\r\nRobert,green\r\nJane,Topaz\r\n");
    const std::string store = " --store-dir " + dir.file("store").string();

    auto digest = run_cli(dir, "digest --platform local --survey-id SV_cli --input " +
                                   csv_path.string() + store);
    CHECK(digest.exit_code == 0);
    CHECK(digest.out.find("SV_cli") != std::string::npos);
    CHECK(digest.out.find("name") != std::string::npos);
    CHECK(digest.out.find("color") != std::string::npos);
    CHECK(std::filesystem::exists(dir.file("raw.csv.digested.csv")));

    auto verify = run_cli(dir, "verify --survey-id SV_cli --input " + csv_path.string() + store);
    CHECK(verify.exit_code == 0);
    CHECK(verify.out.find("No changes detected.") != std::string::npos);

    // Tamper with one cell: RED, exit 1.
    helpers::write_file(csv_path, "name,color\r\nRobert,brown\r\nJane,Topaz\r\n");
    auto tampered = run_cli(dir, "verify --survey-id SV_cli --input " + csv_path.string() + store);
    CHECK(tampered.exit_code == 1);
    CHECK(tampered.out.find("Modified columns: color") != std::string::npos);

    // Structured output is pure JSON on stdout.
    auto structured = run_cli(dir, "verify --survey-id SV_cli --format structured --input " +
                                       csv_path.string() + store);
    CHECK(structured.exit_code == 1);
    const auto report = nlohmann::json::parse(structured.out);
    CHECK(report["verdict"] == "RED");

    auto inspected = run_cli(dir, "inspect --survey-id SV_cli" + store);
    CHECK(inspected.exit_code == 0);
    CHECK(nlohmann::json::parse(inspected.out)["revision"] == 1);
}

TEST_CASE("digest refuses an accidental re-digest without force") {
    helpers::TempDir dir("cli");
    const auto csv_path = dir.file("raw.csv");
    helpers::write_file(csv_path, "a,b\r\n1,2\r\n");
    const std::string store = " --store-dir " + dir.file("store").string();
    const std::string base =
        "digest --platform local --survey-id SV_dup --input " + csv_path.string() + store;

    CHECK(run_cli(dir, base).exit_code == 0);
    const auto repeat = run_cli(dir, base);
    CHECK(repeat.exit_code == 2);
    CHECK(repeat.err.find("force") != std::string::npos);
    CHECK(run_cli(dir, base + " --force").exit_code == 0);
}

TEST_CASE("error paths map to the documented exit codes") {
    helpers::TempDir dir("cli");
    const std::string store = " --store-dir " + dir.file("store").string();

    // Unknown survey: configuration mistake -> 2.
    auto unknown = run_cli(dir, "verify --survey-id SV_nope --input /dev/null" + store);
    CHECK(unknown.exit_code == 2);

    // Missing input file: I/O -> 3.
    helpers::write_file(dir.file("raw.csv"), "a\r\n1\r\n");
    CHECK(run_cli(dir, "digest --platform local --survey-id SV_x --input " +
                           dir.file("raw.csv").string() + store)
              .exit_code == 0);
    auto missing = run_cli(dir, "verify --survey-id SV_x --input " +
                                    dir.file("gone.csv").string() + store);
    CHECK(missing.exit_code == 3);

    // Unparseable flags -> 2.
    CHECK(run_cli(dir, "digest --no-such-flag").exit_code == 2);
    CHECK(run_cli(dir, "").exit_code == 2);

    // Malformed candidate CSV -> 3.
    helpers::write_file(dir.file("bad.csv"), "a\r\n\"unterminated\r\n");
    auto malformed = run_cli(dir, "verify --survey-id SV_x --input " +
                                      dir.file("bad.csv").string() + store);
    CHECK(malformed.exit_code == 3);
}

TEST_CASE("demo prints the published values side by side") {
    helpers::TempDir dir("cli");
    const auto demo = run_cli(dir, "demo");
    CHECK(demo.exit_code == 0);
    CHECK(demo.out.find("0.26") != std::string::npos);
    CHECK(demo.out.find("0.047") != std::string::npos);
    CHECK(demo.out.find("response editing") != std::string::npos);
    CHECK(demo.out.find("row deletion") != std::string::npos);
    CHECK(demo.out.find("row addition") != std::string::npos);
}

TEST_CASE("simulate emits a machine-readable summary") {
    helpers::TempDir dir("cli");
    const auto sim = run_cli(dir, "simulate --scenarios 25 --seed 9");
    CHECK(sim.exit_code == 0);
    const auto summary = nlohmann::json::parse(sim.out);
    CHECK(summary["n_scenarios"] == 25);
    CHECK(summary["deceptive_detection_rate"] == 1.0);
    CHECK(summary["false_positive_rate"] == 0.0);
}

TEST_CASE("ip option pseudonymizes through the CLI") {
    helpers::TempDir dir("cli");
    const auto csv_path = dir.file("raw.csv");
    helpers::write_file(csv_path,
                        "name,ClientIP\r\nRobert,198.51.100.24\r\nJane,198.51.100.24\r\n");
    const auto profile_path = dir.file("platform.profile");
    helpers::write_file(profile_path,
                        "platform_id = local\n"
                        "header_row_count = 1\n"
                        "ip_column_name = ClientIP\n");
    const std::string store = " --store-dir " + dir.file("store").string();

    auto digest = run_cli(dir, "digest --survey-id SV_ip --input " + csv_path.string() +
                                   " --profile-file " + profile_path.string() + " --ip-option" +
                                   store + " --format json");
    CHECK(digest.exit_code == 0);
    const auto body = nlohmann::json::parse(digest.out);
    CHECK(body["record"]["ip_pseudonym_column"] == "IPHash");

    const std::string saved = helpers::read_file(dir.file("raw.csv.digested.csv"));
    CHECK(saved.find("IPHash") != std::string::npos);
    CHECK(saved.find("198.51.100.24") == std::string::npos);

    // The saved copy verifies GREEN against the stored record when parsed
    // with the same profile conventions.
    auto verify = run_cli(dir, "verify --survey-id SV_ip --input " +
                                   dir.file("raw.csv.digested.csv").string() +
                                   " --profile-file " + profile_path.string() + store);
    CHECK(verify.exit_code == 0);
    CHECK(verify.out.find("No changes detected.") != std::string::npos);
}

TEST_CASE("delete-requested rows are dropped and documented") {
    helpers::TempDir dir("cli");
    const auto csv_path = dir.file("raw.csv");
    helpers::write_file(csv_path,
                        "id,remove_me\r\n1,\r\n2,yes\r\n3,\r\n4,TRUE\r\n5,\r\n");
    const std::string store = " --store-dir " + dir.file("store").string();

    auto digest = run_cli(dir, "digest --platform local --survey-id SV_drc --input " +
                                   csv_path.string() + store +
                                   " --delete-requested-column remove_me --format json");
    CHECK(digest.exit_code == 0);
    const auto body = nlohmann::json::parse(digest.out);
    CHECK(body["record"]["deleted_requested_row_count"] == 2);
    CHECK(body["record"]["data_row_count"] == 3);

    const std::string saved = helpers::read_file(dir.file("raw.csv.digested.csv"));
    CHECK(saved.find("2,yes") == std::string::npos);
    CHECK(saved.find("4,TRUE") == std::string::npos);
}
