// nomad — column-hash digests for survey exports, and verification of
// archived datasets against them.
//
// Exit codes: 0 success / verification GREEN; 1 verification RED;
// 2 usage or configuration error; 3 I/O or platform error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "nomad/client.hpp"
#include "nomad/digest.hpp"
#include "nomad/errors.hpp"
#include "nomad/manip.hpp"
#include "nomad/profiles.hpp"
#include "nomad/service.hpp"
#include "nomad/stats.hpp"
#include "nomad/store.hpp"
#include "nomad/verify.hpp"

namespace {

constexpr int kExitGreen = 0;
constexpr int kExitRed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int exit_code_for(const nomad::Error& err) {
    switch (err.kind()) {
    case nomad::ErrorKind::config:
    case nomad::ErrorKind::not_found:
    case nomad::ErrorKind::duplicate:
    case nomad::ErrorKind::stat:
        return kExitUsage;
    case nomad::ErrorKind::parse:
    case nomad::ErrorKind::encoding:
    case nomad::ErrorKind::structure:
    case nomad::ErrorKind::credential:
    case nomad::ErrorKind::transient:
    case nomad::ErrorKind::protocol:
    case nomad::ErrorKind::io:
        return kExitIo;
    }
    return kExitIo;
}

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw nomad::IoError("cannot read " + path);
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

void write_file_or_throw(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.write(bytes.data(), long(bytes.size()))) {
        throw nomad::IoError("cannot write " + path);
    }
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value ? value : fallback;
}

// Credentials come from the environment or a key=value file, never from
// bare flags.
nomad::PlatformCredentials load_credentials(const std::string& credentials_file,
                                            const std::string& base_url) {
    nomad::PlatformCredentials credentials;
    credentials.base_url = base_url;
    credentials.api_token = env_or("NOMAD_API_TOKEN", "");
    const std::string user = env_or("NOMAD_BASIC_USER", "");
    const std::string pass = env_or("NOMAD_BASIC_PASSWORD", "");
    if (!user.empty()) {
        credentials.username = user;
        credentials.password = pass;
    }
    if (!credentials_file.empty()) {
        std::istringstream in(read_file_or_throw(credentials_file));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 1);
            if (key == "api_token") credentials.api_token = value;
            if (key == "username") credentials.username = value;
            if (key == "password") credentials.password = value;
        }
    }
    return credentials;
}

struct CommonFlags {
    std::string store_dir;
    std::string format = "text";
};

struct DigestFlags {
    std::string survey_id;
    std::string platform = "local";
    std::string input;
    std::string base_url;
    std::string profile_file;
    std::string credentials_file;
    std::string output;
    std::string delete_requested_column;
    int header_rows = 0;
    bool ip_option = false;
    bool force = false;
    bool fetch_edited = false;
};

nomad::PlatformProfile resolve_profile(const std::string& platform,
                                       const std::string& profile_file, int header_rows) {
    nomad::PlatformProfile profile = profile_file.empty()
                                         ? nomad::builtin_profile(platform)
                                         : nomad::load_profile_file(profile_file);
    if (header_rows > 0) profile.header_row_count = header_rows;
    return profile;
}

int cmd_digest(const CommonFlags& common, const DigestFlags& flags) {
    const nomad::PlatformProfile profile =
        resolve_profile(flags.platform, flags.profile_file, flags.header_rows);

    // --input reads a file in the profile's format; --base-url fetches
    // through the platform adapter.
    std::string csv_bytes;
    std::string output_path = flags.output;
    if (!flags.input.empty()) {
        csv_bytes = read_file_or_throw(flags.input);
        if (output_path.empty()) output_path = flags.input + ".digested.csv";
    } else {
        if (flags.base_url.empty()) {
            throw nomad::ConfigError("digest needs --input (a file) or --base-url (a platform)");
        }
        nomad::PlatformCredentials credentials =
            load_credentials(flags.credentials_file, flags.base_url);
        nomad::ExportRequest request;
        request.survey_id = flags.survey_id;
        request.fetch_unedited = !flags.fetch_edited;
        csv_bytes = nomad::fetch_raw_csv(credentials, request, profile);
        if (output_path.empty()) output_path = flags.survey_id + ".digested.csv";
    }

    nomad::DigestOptions options;
    options.survey_id = flags.survey_id;
    options.ip_option = flags.ip_option;
    if (!flags.delete_requested_column.empty()) {
        options.delete_requested_column = flags.delete_requested_column;
    }

    const nomad::CanonicalTable table = nomad::parse_csv(csv_bytes, profile);
    nomad::DigestResult result = nomad::digest_table(table, options);

    nomad::DigestStore store(common.store_dir);
    const int revision = store.put(result.record, flags.force);
    write_file_or_throw(output_path, nomad::serialize_csv(result.table));

    if (common.format == "json") {
        nomad::njson body;
        body["survey_id"] = flags.survey_id;
        body["revision"] = revision;
        body["output_csv"] = output_path;
        body["record"] = nomad::record_to_json(result.record);
        std::cout << body.dump(2) << "\n";
    } else {
        std::cout << "Digested survey " << flags.survey_id << " (revision " << revision
                  << ")\n";
        std::cout << "  platform:         " << result.record.platform_id << "\n";
        std::cout << "  data rows:        " << result.record.data_row_count << "\n";
        if (result.record.deleted_requested_row_count > 0) {
            std::cout << "  delete-requested: " << result.record.deleted_requested_row_count
                      << " row(s) removed before hashing\n";
        }
        std::cout << "  local copy:       " << output_path << "\n";
        std::cout << "  store:            " << store.dir().string() << "\n";
        std::cout << "  columns (" << result.record.columns.size() << "):\n";
        for (const auto& entry : result.record.columns) {
            std::cout << "    " << entry.hash << "  " << entry.name << "\n";
        }
        for (const auto& warning : result.table.warnings) {
            std::cout << "  warning: " << warning << "\n";
        }
    }
    return kExitGreen;
}

struct VerifyFlags {
    std::string survey_id;
    std::string input;
    std::string profile_file;
    int revision = 0;
};

int cmd_verify(const CommonFlags& common, const VerifyFlags& flags) {
    nomad::DigestStore store(common.store_dir);
    const auto [record, revision] = store.get_with_revision(
        flags.survey_id,
        flags.revision > 0 ? std::optional<int>(flags.revision) : std::nullopt);

    // The record pins the profile family; an override file can refine the
    // status/IP conventions but the header depth must still match.
    nomad::PlatformProfile profile = flags.profile_file.empty()
                                         ? nomad::builtin_profile(record.platform_id)
                                         : nomad::load_profile_file(flags.profile_file);
    if (flags.profile_file.empty()) profile.header_row_count = record.header_row_count;
    const nomad::CanonicalTable candidate =
        nomad::parse_csv(read_file_or_throw(flags.input), profile);

    const nomad::VerificationReport report = nomad::verify(record, candidate, revision);
    const auto format = common.format == "json" || common.format == "structured"
                            ? nomad::ReportFormat::structured
                            : nomad::ReportFormat::text;
    std::cout << nomad::render_report(report, format);
    return report.verdict == nomad::Verdict::red ? kExitRed : kExitGreen;
}

int cmd_inspect(const CommonFlags& common, const std::string& survey_id, int revision) {
    nomad::DigestStore store(common.store_dir);
    const auto [record, actual] = store.get_with_revision(
        survey_id, revision > 0 ? std::optional<int>(revision) : std::nullopt);
    nomad::njson body;
    body["survey_id"] = survey_id;
    body["revision"] = actual;
    body["record"] = nomad::record_to_json(record);
    std::cout << body.dump(2) << "\n";
    return kExitGreen;
}

int cmd_simulate(long scenarios, std::uint64_t seed) {
    const nomad::ScenarioSummary summary = nomad::run_scenario_suite(scenarios, seed);
    std::cout << nomad::summary_to_json(summary).dump(2) << "\n";
    return kExitGreen;
}

// Reproduces the toy experiment and its manipulations, printing the test
// p-value next to the published value for each variant.
int cmd_demo() {
    using nomad::ManipKind;
    using nomad::ManipulationSpec;

    const nomad::ExperimentConfig config{48, 52, 32, 40, 7};
    const nomad::CanonicalTable base = nomad::generate_experiment(config);

    struct Variant {
        const char* label;
        nomad::CanonicalTable table;
        double expected_p;
    };
    std::vector<Variant> variants;
    variants.push_back({"collected data (48 control / 52 treatment)", base, 0.26});

    // Switch four control-group yes responses to no.
    {
        ManipulationSpec spec;
        spec.kind = ManipKind::edit_cells;
        spec.columns = {"intends_to_vote"};
        spec.values = {"no"};
        long flipped = 0;
        for (long r = 0; r < base.data_row_count() && flipped < 4; ++r) {
            if (base.data_cell(1, r) == "control" && base.data_cell(2, r) == "yes") {
                spec.rows.push_back(r);
                ++flipped;
            }
        }
        variants.push_back(
            {"response editing (4 control yes -> no)", apply_manipulation(base, spec, 1), 0.047});
    }
    // Delete 3 control-yes rows and 4 treatment-no rows.
    {
        ManipulationSpec spec;
        spec.kind = ManipKind::delete_rows;
        long control_yes = 0, treatment_no = 0;
        for (long r = 0; r < base.data_row_count(); ++r) {
            const bool control = base.data_cell(1, r) == "control";
            const bool yes = base.data_cell(2, r) == "yes";
            if (control && yes && control_yes < 3) {
                spec.rows.push_back(r);
                ++control_yes;
            } else if (!control && !yes && treatment_no < 4) {
                spec.rows.push_back(r);
                ++treatment_no;
            }
        }
        variants.push_back(
            {"row deletion (3 control yes, 4 treatment no)", apply_manipulation(base, spec, 1),
             0.038});
    }
    // Add 4 fabricated control-no and 5 treatment-yes rows.
    {
        nomad::CanonicalTable padded = base;
        auto append = [&](const char* condition, const char* vote, int n) {
            for (int i = 0; i < n; ++i) {
                padded.columns[0].cells.push_back("F" + std::to_string(i));
                padded.columns[1].cells.push_back(condition);
                padded.columns[2].cells.push_back(vote);
            }
        };
        append("control", "no", 4);
        append("treatment", "yes", 5);
        variants.push_back(
            {"row addition (4 control no, 5 treatment yes)", std::move(padded), 0.047});
    }

    std::cout << "Two-proportion test across manipulation variants\n\n";
    std::printf("  %-46s %9s %9s %10s\n", "variant", "computed", "expected", "|z|");
    for (const auto& variant : variants) {
        const auto [yes_c, n_c] = nomad::count_condition(variant.table, "control");
        const auto [yes_t, n_t] = nomad::count_condition(variant.table, "treatment");
        const nomad::TestResult result = nomad::two_proportion_z(yes_c, n_c, yes_t, n_t);
        std::printf("  %-46s %9.3f %9.3g %10.3f\n", variant.label, result.p,
                    variant.expected_p, std::abs(result.z));
    }
    return kExitGreen;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tamper-evident column digests for survey data"};
    app.require_subcommand(1);
    app.footer(
        "Environment:\n"
        "  NOMAD_STORE_DIR       default digest store directory\n"
        "  NOMAD_API_TOKEN       platform API token (digest --base-url, serve fetch mode)\n"
        "  NOMAD_BASIC_USER      basic-auth user for surveycto-style platforms\n"
        "  NOMAD_BASIC_PASSWORD  basic-auth password\n"
        "  NOMAD_AUTH_TOKEN      bearer token for `serve` (override with --token-env)\n"
        "Exit codes:\n"
        "  0 success / verification GREEN   1 verification RED\n"
        "  2 usage or configuration error   3 I/O or platform error");

    CommonFlags common;
    common.store_dir = env_or("NOMAD_STORE_DIR", "./nomad-store");

    DigestFlags digest_flags;
    auto* digest = app.add_subcommand("digest", "Fetch or read a CSV export and store its digest");
    digest->add_option("--survey-id", digest_flags.survey_id, "Survey identifier")->required();
    digest->add_option("--platform", digest_flags.platform, "local|qualtrics|surveycto");
    digest->add_option("--input", digest_flags.input, "Local CSV file");
    digest->add_option("--base-url", digest_flags.base_url, "Platform API base URL");
    digest->add_option("--profile-file", digest_flags.profile_file, "Profile override file");
    digest->add_option("--credentials-file", digest_flags.credentials_file,
                       "key=value file with api_token/username/password");
    digest->add_option("--header-rows", digest_flags.header_rows,
                       "Header row count override (local profiles)");
    digest->add_option("--output", digest_flags.output, "Path for the digested CSV copy");
    digest->add_option("--delete-requested-column", digest_flags.delete_requested_column,
                       "Column marking rows to remove before hashing");
    digest->add_flag("--ip-option", digest_flags.ip_option,
                     "Replace the profile's IP column with salted pseudonyms");
    digest->add_flag("--force", digest_flags.force, "Append a new revision if already digested");
    digest->add_flag("--fetch-edited", digest_flags.fetch_edited,
                     "Fetch the edited view instead of the unedited export");
    digest->add_option("--store-dir", common.store_dir, "Digest store directory");
    digest->add_option("--format", common.format, "text|json");

    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "Compare an archived CSV against a stored digest");
    verify->add_option("--survey-id", verify_flags.survey_id, "Survey identifier")->required();
    verify->add_option("--input", verify_flags.input, "Archived CSV file")->required();
    verify->add_option("--profile-file", verify_flags.profile_file, "Profile override file");
    verify->add_option("--revision", verify_flags.revision, "Digest revision (default latest)");
    verify->add_option("--store-dir", common.store_dir, "Digest store directory");
    verify->add_option("--format", common.format, "text|structured");

    std::string inspect_survey;
    int inspect_revision = 0;
    auto* inspect = app.add_subcommand("inspect", "Print a stored digest record");
    inspect->add_option("--survey-id", inspect_survey, "Survey identifier")->required();
    inspect->add_option("--revision", inspect_revision, "Digest revision (default latest)");
    inspect->add_option("--store-dir", common.store_dir, "Digest store directory");

    long scenarios = 1000;
    std::uint64_t seed = 42;
    auto* simulate =
        app.add_subcommand("simulate", "Run the manipulation detection scenario suite");
    simulate->add_option("--scenarios", scenarios, "Number of scenarios");
    simulate->add_option("--seed", seed, "Deterministic seed");

    auto* demo = app.add_subcommand(
        "demo", "Reproduce the toy experiment manipulations and their p-values");

    nomad::NomadService::Config service_config;
    std::string token_env = "NOMAD_AUTH_TOKEN";
    std::string serve_store_dir;
    std::string serve_log;
    int serve_port = 8472;
    std::size_t max_upload_mb = 100;
    auto* serve = app.add_subcommand("serve", "Run the digest/verify HTTP service");
    serve->add_option("--host", service_config.host, "Bind host");
    serve->add_option("--port", serve_port, "Bind port");
    serve->add_option("--store-dir", serve_store_dir, "Digest store directory");
    serve->add_option("--log-file", serve_log, "Request log path (default stderr)");
    serve->add_option("--token-env", token_env,
                      "Environment variable holding the bearer token");
    serve->add_option("--max-upload-mb", max_upload_mb, "Upload size cap in MiB");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (digest->parsed()) return cmd_digest(common, digest_flags);
        if (verify->parsed()) return cmd_verify(common, verify_flags);
        if (inspect->parsed()) return cmd_inspect(common, inspect_survey, inspect_revision);
        if (simulate->parsed()) return cmd_simulate(scenarios, seed);
        if (demo->parsed()) return cmd_demo();
        if (serve->parsed()) {
            service_config.store_dir = serve_store_dir.empty() ? common.store_dir
                                                               : serve_store_dir;
            service_config.port = serve_port;
            service_config.log_path = serve_log;
            service_config.max_upload_bytes = max_upload_mb * 1024 * 1024;
            service_config.auth_token = env_or(token_env.c_str(), "");
            if (service_config.auth_token.empty()) {
                throw nomad::ConfigError("set " + token_env + " to a non-empty bearer token");
            }
            service_config.platform_token = env_or("NOMAD_API_TOKEN", "");
            service_config.platform_username = env_or("NOMAD_BASIC_USER", "");
            service_config.platform_password = env_or("NOMAD_BASIC_PASSWORD", "");
            nomad::NomadService service(std::move(service_config));
            service.run();
            return kExitGreen;
        }
    } catch (const nomad::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
