#include "nomad/client.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "nomad/errors.hpp"
#include "nomad/zipfile.hpp"

namespace nomad {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string read_local(const PlatformCredentials& credentials, const ExportRequest& request) {
    namespace fs = std::filesystem;
    fs::path path(credentials.base_url);
    if (fs::is_directory(path)) {
        path /= request.survey_id + ".csv";
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read local export " + path.string());
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

[[noreturn]] void throw_for_status(int status, const std::string& what) {
    if (status == 401 || status == 403) {
        throw CredentialError(what + ": authentication rejected (" + std::to_string(status) +
                              ")");
    }
    if (status >= 500) {
        throw TransientError(what + ": server error " + std::to_string(status));
    }
    throw ProtocolError(what + ": unexpected status " + std::to_string(status));
}

struct Deadline {
    Clock::time_point end;

    void check(const char* stage) const {
        if (Clock::now() >= end) {
            throw TransientError(std::string(stage) + ": total fetch timeout exceeded");
        }
    }
};

json parse_json_body(const httplib::Result& res, const std::string& what) {
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw ProtocolError(what + ": malformed JSON response: " + e.what());
    }
}

std::string fetch_qualtrics_once(httplib::Client& http, const PlatformCredentials& credentials,
                                 const ExportRequest& request, const FetchOptions& options,
                                 const Deadline& deadline) {
    const auto& ep = options.endpoints;
    httplib::Headers headers{{"X-API-TOKEN", credentials.api_token}};

    json body;
    body["surveyId"] = request.survey_id;
    body["format"] = "csv";
    body[ep.unedited_flag] = request.fetch_unedited;
    body[ep.include_ips_flag] = request.include_ips;

    auto start = http.Post(ep.start_path, headers, body.dump(), "application/json");
    if (!start) {
        throw TransientError("start export: connection failed");
    }
    if (start->status != 200 && start->status != 201) {
        throw_for_status(start->status, "start export");
    }
    const json start_body = parse_json_body(start, "start export");
    if (!start_body.contains("jobId")) {
        throw ProtocolError("start export: response lacks jobId");
    }
    const std::string job_id = start_body["jobId"].get<std::string>();

    std::string file_id;
    for (int poll = 0; poll < options.backoff.max_poll_attempts; ++poll) {
        deadline.check("poll export");
        auto progress = http.Get(ep.poll_path + job_id, headers);
        if (!progress) {
            throw TransientError("poll export: connection failed");
        }
        if (progress->status != 200) {
            throw_for_status(progress->status, "poll export");
        }
        const json poll_body = parse_json_body(progress, "poll export");
        const std::string status = poll_body.value("status", "");
        if (status == "complete") {
            if (!poll_body.contains("fileId")) {
                throw ProtocolError("poll export: complete without fileId");
            }
            file_id = poll_body["fileId"].get<std::string>();
            break;
        }
        if (status == "failed") {
            throw TransientError("poll export: job failed");
        }
        if (status != "inProgress") {
            throw ProtocolError("poll export: unknown status '" + status + "'");
        }
        std::this_thread::sleep_for(options.backoff.poll_interval);
    }
    if (file_id.empty()) {
        throw TransientError("poll export: job did not complete within " +
                             std::to_string(options.backoff.max_poll_attempts) + " polls");
    }

    deadline.check("download export");
    auto file = http.Get(ep.file_path + file_id, headers);
    if (!file) {
        throw TransientError("download export: connection failed");
    }
    if (file->status != 200) {
        throw_for_status(file->status, "download export");
    }
    return zip_unpack_single(file->body).bytes;
}

std::string fetch_surveycto_once(httplib::Client& http, const ExportRequest& request,
                                 const FetchOptions& options) {
    const auto& ep = options.endpoints;
    const std::string mode = request.fetch_unedited ? ep.mode_original : ep.mode_edited;
    const std::string path = ep.data_path + request.survey_id + "?" + ep.mode_param + "=" + mode;
    auto res = http.Get(path);
    if (!res) {
        throw TransientError("fetch data: connection failed");
    }
    if (res->status != 200) {
        throw_for_status(res->status, "fetch data");
    }
    return res->body;
}

} // namespace

std::string fetch_raw_csv(const PlatformCredentials& credentials, const ExportRequest& request,
                          const PlatformProfile& profile, const FetchOptions& options) {
    if (request.survey_id.empty()) {
        throw ConfigError("export request needs a survey id");
    }
    if (profile.platform_id == "local") {
        return read_local(credentials, request);
    }
    if (credentials.base_url.empty()) {
        throw ConfigError("platform fetch needs a base URL");
    }

    const Deadline deadline{Clock::now() + options.backoff.total_timeout};
    auto delay = options.backoff.initial_delay;
    for (int attempt = 1;; ++attempt) {
        try {
            httplib::Client http(credentials.base_url);
            http.set_connection_timeout(10, 0);
            http.set_read_timeout(30, 0);
            if (profile.platform_id == "surveycto") {
                if (credentials.username && credentials.password) {
                    http.set_basic_auth(*credentials.username, *credentials.password);
                }
                return fetch_surveycto_once(http, request, options);
            }
            if (profile.platform_id == "qualtrics") {
                return fetch_qualtrics_once(http, credentials, request, options, deadline);
            }
            throw ConfigError("no fetch adapter for platform '" + profile.platform_id + "'");
        } catch (const TransientError&) {
            if (attempt >= options.backoff.max_attempts) {
                throw;
            }
            deadline.check("retry");
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(
                std::int64_t(double(delay.count()) * options.backoff.factor));
        }
    }
}

} // namespace nomad
