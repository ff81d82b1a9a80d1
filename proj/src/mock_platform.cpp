#include "nomad/mock_platform.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "nomad/errors.hpp"
#include "nomad/zipfile.hpp"

namespace nomad {

namespace {

using json = nlohmann::json;

std::string base64_encode(std::string_view input) {
    static constexpr char kAlphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((input.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= input.size()) {
        const std::uint32_t v = (std::uint8_t(input[i]) << 16) |
                                (std::uint8_t(input[i + 1]) << 8) | std::uint8_t(input[i + 2]);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
        i += 3;
    }
    const std::size_t rest = input.size() - i;
    if (rest == 1) {
        const std::uint32_t v = std::uint8_t(input[i]) << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.append("==");
    } else if (rest == 2) {
        const std::uint32_t v =
            (std::uint8_t(input[i]) << 16) | (std::uint8_t(input[i + 1]) << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.append("=");
    }
    return out;
}

struct Job {
    std::string survey_id;
    bool unedited = true;
    int polls_left = 0;
    std::string file_id;
};

} // namespace

struct MockPlatformServer::Impl {
    Config config;
    std::map<std::string, MockFixture> fixtures;
    httplib::Server server;
    std::thread server_thread;
    int bound_port = 0;

    std::mutex mutex;
    std::map<std::string, Job> jobs;
    std::map<std::string, std::string> files;  // fileId -> zip bytes
    int next_id = 1;
    std::atomic<int> start_calls{0};
    std::atomic<int> poll_calls{0};
    std::atomic<int> download_calls{0};
    std::atomic<int> downloads_to_fail{0};

    bool token_ok(const httplib::Request& req) const {
        return req.get_header_value("X-API-TOKEN") == config.api_token;
    }

    bool basic_ok(const httplib::Request& req) const {
        const std::string expected =
            "Basic " + base64_encode(config.username + ":" + config.password);
        return req.get_header_value("Authorization") == expected;
    }

    void routes() {
        server.Post("/export", [this](const httplib::Request& req, httplib::Response& res) {
            ++start_calls;
            if (!token_ok(req)) {
                res.status = 401;
                res.set_content(R"({"error":"bad token"})", "application/json");
                return;
            }
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::exception&) {
                res.status = 400;
                res.set_content(R"({"error":"bad body"})", "application/json");
                return;
            }
            const std::string survey_id = body.value("surveyId", "");
            std::lock_guard<std::mutex> lock(mutex);
            if (!fixtures.count(survey_id)) {
                res.status = 404;
                res.set_content(R"({"error":"unknown survey"})", "application/json");
                return;
            }
            Job job;
            job.survey_id = survey_id;
            job.unedited = body.value("uneditedData", true);
            job.polls_left = config.polls_until_complete;
            const std::string job_id = "job-" + std::to_string(next_id++);
            jobs[job_id] = job;
            res.set_content(json{{"jobId", job_id}}.dump(), "application/json");
        });

        server.Get(R"(/export/(job-\d+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       ++poll_calls;
                       if (!token_ok(req)) {
                           res.status = 401;
                           return;
                       }
                       std::lock_guard<std::mutex> lock(mutex);
                       auto it = jobs.find(req.matches[1]);
                       if (it == jobs.end()) {
                           res.status = 404;
                           return;
                       }
                       Job& job = it->second;
                       if (job.polls_left > 0) {
                           --job.polls_left;
                           res.set_content(json{{"status", "inProgress"}}.dump(),
                                           "application/json");
                           return;
                       }
                       if (job.file_id.empty()) {
                           job.file_id = "file-" + std::to_string(next_id++);
                           const auto& fixture = fixtures.at(job.survey_id);
                           const std::string& csv =
                               job.unedited ? fixture.original_csv : fixture.edited_csv;
                           files[job.file_id] =
                               zip_pack({ZipEntry{job.survey_id + ".csv", csv}});
                       }
                       res.set_content(
                           json{{"status", "complete"}, {"fileId", job.file_id}}.dump(),
                           "application/json");
                   });

        server.Get(R"(/file/(file-\d+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       ++download_calls;
                       if (!token_ok(req)) {
                           res.status = 401;
                           return;
                       }
                       if (downloads_to_fail.fetch_sub(1) > 0) {
                           res.status = 500;
                           return;
                       }
                       std::lock_guard<std::mutex> lock(mutex);
                       auto it = files.find(req.matches[1]);
                       if (it == files.end()) {
                           res.status = 404;
                           return;
                       }
                       res.set_content(it->second, "application/zip");
                   });

        server.Get(R"(/data/csv/([^/?]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       if (!basic_ok(req)) {
                           res.status = 401;
                           res.set_header("WWW-Authenticate", "Basic realm=\"export\"");
                           return;
                       }
                       std::lock_guard<std::mutex> lock(mutex);
                       auto it = fixtures.find(req.matches[1]);
                       if (it == fixtures.end()) {
                           res.status = 404;
                           return;
                       }
                       const bool edited = req.get_param_value("dataMode") == "edited";
                       res.set_content(edited ? it->second.edited_csv
                                              : it->second.original_csv,
                                       "text/csv");
                   });
    }
};

MockPlatformServer::MockPlatformServer(Config config, std::map<std::string, MockFixture> fixtures)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->fixtures = std::move(fixtures);
    impl_->downloads_to_fail = impl_->config.fail_downloads;
    impl_->routes();

    impl_->bound_port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->bound_port <= 0) {
        throw IoError("mock platform could not bind a port");
    }
    impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

MockPlatformServer::~MockPlatformServer() {
    stop();
}

void MockPlatformServer::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_->server_thread.joinable()) {
        impl_->server_thread.join();
    }
}

int MockPlatformServer::port() const {
    return impl_->bound_port;
}

std::string MockPlatformServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->bound_port);
}

int MockPlatformServer::start_calls() const {
    return impl_->start_calls.load();
}
int MockPlatformServer::poll_calls() const {
    return impl_->poll_calls.load();
}
int MockPlatformServer::download_calls() const {
    return impl_->download_calls.load();
}

} // namespace nomad
