#ifndef NOMAD_CLIENT_HPP
#define NOMAD_CLIENT_HPP

#include <chrono>
#include <optional>
#include <string>

#include "nomad/csv.hpp"

namespace nomad {

// Secrets are kept in memory only: never logged, never serialized into
// records or reports.
struct PlatformCredentials {
    std::string base_url;  // scheme://host:port, or a file/dir for "local"
    std::string api_token;
    std::optional<std::string> username;  // surveycto-style basic auth
    std::optional<std::string> password;
};

struct ExportRequest {
    std::string survey_id;
    bool fetch_unedited = true;  // discard in-platform edits
    bool include_ips = false;
};

// Endpoint shapes for the export protocol. Paths and the discard-edits
// parameter are configuration, not constants, so a deployment can point the
// adapter at a real platform without code changes.
struct EndpointConfig {
    // qualtrics-style three-step flow
    std::string start_path = "/export";
    std::string poll_path = "/export/";  // + jobId
    std::string file_path = "/file/";    // + fileId
    std::string unedited_flag = "uneditedData";
    std::string include_ips_flag = "includeIps";
    // surveycto-style single fetch
    std::string data_path = "/data/csv/";  // + survey_id
    std::string mode_param = "dataMode";
    std::string mode_original = "original";
    std::string mode_edited = "edited";
};

struct BackoffPolicy {
    std::chrono::milliseconds initial_delay{1000};
    double factor = 2.0;
    int max_attempts = 5;
    std::chrono::milliseconds poll_interval{1000};
    int max_poll_attempts = 30;
    std::chrono::milliseconds total_timeout{120000};
};

struct FetchOptions {
    EndpointConfig endpoints;
    BackoffPolicy backoff;
};

// Fetches the raw CSV export for one survey.
//
//   qualtrics  — POST start (authenticated, carries format + unedited flag),
//                poll until complete with bounded attempts, download and
//                unpack the zipped CSV
//   surveycto  — one authenticated GET of the wide-format CSV
//   local      — read base_url directly (a file, or a directory holding
//                <survey_id>.csv)
//
// The payload is returned to the caller and held nowhere else. Transient
// failures (network, 5xx, failed jobs) are retried with exponential
// backoff; authentication failures are not retried.
std::string fetch_raw_csv(const PlatformCredentials& credentials, const ExportRequest& request,
                          const PlatformProfile& profile, const FetchOptions& options = {});

} // namespace nomad

#endif
