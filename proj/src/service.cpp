#include "nomad/service.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "nomad/client.hpp"
#include "nomad/errors.hpp"
#include "nomad/profiles.hpp"
#include "nomad/store.hpp"
#include "nomad/verify.hpp"

namespace nomad {

bool constant_time_equal(std::string_view a, std::string_view b) {
    // Scans the full length of the presented token regardless of where the
    // first mismatch sits; only the length itself is observable.
    unsigned char diff = a.size() == b.size() ? 0 : 1;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char expected = a.empty() ? 0 : a[i % a.size()];
        diff |= static_cast<unsigned char>(expected ^ b[i]);
    }
    return diff == 0;
}

namespace {

class Logger {
public:
    explicit Logger(const std::filesystem::path& path) {
        if (!path.empty()) {
            file_ = std::fopen(path.c_str(), "a");
            if (!file_) {
                throw IoError("cannot open log file " + path.string());
            }
        }
    }
    ~Logger() {
        if (file_) std::fclose(file_);
    }

    void line(const std::string& text) {
        std::lock_guard<std::mutex> lock(mutex_);
        std::FILE* out = file_ ? file_ : stderr;
        std::fputs((text + "\n").c_str(), out);
        std::fflush(out);
    }

private:
    std::FILE* file_ = nullptr;
    std::mutex mutex_;
};

int status_for(const Error& err) {
    switch (err.kind()) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::duplicate: return 409;
    case ErrorKind::parse:
    case ErrorKind::encoding:
    case ErrorKind::structure:
    case ErrorKind::config:
    case ErrorKind::stat: return 422;
    case ErrorKind::credential: return 502;  // upstream platform rejected us
    case ErrorKind::transient:
    case ErrorKind::protocol: return 502;
    case ErrorKind::io: return 500;
    }
    return 500;
}

njson error_body(const std::string& message) {
    return njson{{"error", message}};
}

} // namespace

struct NomadService::Impl {
    Config config;
    DigestStore store;
    Logger logger;
    httplib::Server server;
    std::thread server_thread;
    int bound_port = 0;
    std::atomic<std::uint64_t> next_request_id{1};

    explicit Impl(Config cfg)
        : config(std::move(cfg)), store(config.store_dir), logger(config.log_path) {
        if (config.auth_token.empty()) {
            throw ConfigError("service requires a non-empty auth token");
        }
        server.set_payload_max_length(config.max_upload_bytes);
        routes();
    }

    bool authorized(const httplib::Request& req) const {
        const std::string header = req.get_header_value("Authorization");
        constexpr std::string_view kPrefix = "Bearer ";
        if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) {
            return false;
        }
        return constant_time_equal(config.auth_token, header.substr(kPrefix.size()));
    }

    std::string request_id() {
        char buf[24];
        std::snprintf(buf, sizeof buf, "req-%06llu",
                      static_cast<unsigned long long>(next_request_id.fetch_add(1)));
        return buf;
    }

    // Wraps a handler with auth, error mapping, and the request log. The
    // log carries ids and statuses, never payload bytes or tokens.
    template <typename Fn>
    auto wrap(Fn&& fn) {
        return [this, fn = std::forward<Fn>(fn)](const httplib::Request& req,
                                                 httplib::Response& res) {
            const std::string rid = request_id();
            if (!authorized(req)) {
                res.status = 401;
                res.set_content(error_body("missing or invalid bearer token").dump(),
                                "application/json");
            } else {
                try {
                    fn(req, res);
                } catch (const Error& err) {
                    res.status = status_for(err);
                    res.set_content(error_body(err.what()).dump(), "application/json");
                } catch (const std::exception& err) {
                    res.status = 500;
                    res.set_content(error_body("internal error").dump(), "application/json");
                    logger.line("[" + rid + "] unhandled exception: " + std::string(err.what()));
                }
            }
            logger.line("[" + rid + "] " + req.method + " " + req.path + " -> " +
                        std::to_string(res.status));
        };
    }

    static std::string param(const httplib::Request& req, const std::string& key,
                             const std::string& fallback = "") {
        if (req.is_multipart_form_data()) {
            if (req.has_file(key)) return req.get_file_value(key).content;
            return fallback;
        }
        return req.has_param(key) ? req.get_param_value(key) : fallback;
    }

    static bool truthy(const std::string& value) {
        return value == "1" || value == "true" || value == "yes";
    }

    PlatformProfile profile_for(const std::string& platform_id,
                                const std::string& header_rows) const {
        PlatformProfile profile = builtin_profile(platform_id.empty() ? "local" : platform_id);
        if (!header_rows.empty()) {
            try {
                profile.header_row_count = std::stoi(header_rows);
            } catch (const std::exception&) {
                throw ConfigError("header_row_count must be an integer");
            }
            if (profile.header_row_count < 1) {
                throw ConfigError("header_row_count must be >= 1");
            }
        }
        return profile;
    }

    void handle_digest(const httplib::Request& req, httplib::Response& res) {
        const std::string survey_id = param(req, "survey_id");
        if (survey_id.empty()) {
            throw ConfigError("survey_id is required");
        }
        const PlatformProfile profile =
            profile_for(param(req, "platform"), param(req, "header_row_count"));

        std::string csv_bytes;
        if (param(req, "mode") == "fetch") {
            PlatformCredentials credentials;
            credentials.base_url = param(req, "base_url");
            credentials.api_token = config.platform_token;
            if (!config.platform_username.empty()) {
                credentials.username = config.platform_username;
                credentials.password = config.platform_password;
            }
            ExportRequest request;
            request.survey_id = survey_id;
            request.fetch_unedited = !truthy(param(req, "fetch_edited"));
            csv_bytes = fetch_raw_csv(credentials, request, profile);
        } else if (req.has_file("file")) {
            csv_bytes = req.get_file_value("file").content;
        } else {
            throw ConfigError("provide a CSV upload in 'file' or mode=fetch parameters");
        }

        DigestOptions options;
        options.survey_id = survey_id;
        options.ip_option = truthy(param(req, "ip_option"));
        const std::string drc = param(req, "delete_requested_column");
        if (!drc.empty()) options.delete_requested_column = drc;

        const CanonicalTable table = parse_csv(csv_bytes, profile);
        DigestResult result = digest_table(table, options);
        const int revision = store.put(result.record, truthy(param(req, "force")));

        njson body;
        body["survey_id"] = survey_id;
        body["revision"] = revision;
        body["record"] = record_to_json(result.record);
        res.status = 201;
        res.set_content(body.dump(2), "application/json");
    }

    void handle_verify(const httplib::Request& req, httplib::Response& res) {
        const std::string survey_id = param(req, "survey_id");
        if (survey_id.empty()) {
            throw ConfigError("survey_id is required");
        }
        if (!req.has_file("file")) {
            throw ConfigError("provide the candidate CSV in 'file'");
        }
        std::optional<int> revision;
        const std::string revision_text = param(req, "revision");
        if (!revision_text.empty()) {
            try {
                revision = std::stoi(revision_text);
            } catch (const std::exception&) {
                throw ConfigError("revision must be an integer");
            }
        }

        const auto [record, actual_revision] = store.get_with_revision(survey_id, revision);
        PlatformProfile profile = builtin_profile(record.platform_id);
        profile.header_row_count = record.header_row_count;
        const CanonicalTable candidate = parse_csv(req.get_file_value("file").content, profile);
        const VerificationReport report = verify(record, candidate, actual_revision);
        res.status = 200;
        res.set_content(report_to_json(report).dump(2), "application/json");
    }

    void handle_get_record(const httplib::Request& req, httplib::Response& res) {
        const std::string survey_id = req.path_params.at("survey_id");
        std::optional<int> revision;
        if (req.has_param("revision")) {
            try {
                revision = std::stoi(req.get_param_value("revision"));
            } catch (const std::exception&) {
                throw ConfigError("revision must be an integer");
            }
        }
        const auto [record, actual_revision] = store.get_with_revision(survey_id, revision);
        njson body;
        body["survey_id"] = survey_id;
        body["revision"] = actual_revision;
        body["record"] = record_to_json(record);
        res.status = 200;
        res.set_content(body.dump(2), "application/json");
    }

    void routes() {
        server.Post("/api/v1/digests", wrap([this](const httplib::Request& req,
                                                   httplib::Response& res) {
            handle_digest(req, res);
        }));
        server.Post("/api/v1/verify", wrap([this](const httplib::Request& req,
                                                  httplib::Response& res) {
            handle_verify(req, res);
        }));
        server.Get("/api/v1/digests/:survey_id", wrap([this](const httplib::Request& req,
                                                             httplib::Response& res) {
            handle_get_record(req, res);
        }));
    }
};

NomadService::NomadService(Config config) : impl_(std::make_unique<Impl>(std::move(config))) {}

NomadService::~NomadService() {
    stop();
}

int NomadService::start() {
    if (impl_->config.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(impl_->config.host);
    } else {
        impl_->bound_port =
            impl_->server.bind_to_port(impl_->config.host, impl_->config.port)
                ? impl_->config.port
                : -1;
    }
    if (impl_->bound_port <= 0) {
        throw IoError("service could not bind " + impl_->config.host);
    }
    impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    impl_->logger.line("listening on " + impl_->config.host + ":" +
                       std::to_string(impl_->bound_port));
    return impl_->bound_port;
}

void NomadService::run() {
    const int port = start();
    impl_->logger.line("store directory: " + impl_->config.store_dir.string());
    (void)port;
    if (impl_->server_thread.joinable()) {
        impl_->server_thread.join();
    }
}

void NomadService::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_->server_thread.joinable()) {
        impl_->server_thread.join();
    }
}

int NomadService::port() const {
    return impl_->bound_port;
}

} // namespace nomad
