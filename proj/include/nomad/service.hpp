#ifndef NOMAD_SERVICE_HPP
#define NOMAD_SERVICE_HPP

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace nomad {

// Single-tenant digest/verify service. One bearer token, one store
// directory. Uploads are processed in memory and discarded — cell data
// never reaches the store or the log.
//
//   POST /api/v1/digests              multipart CSV + options, or
//                                     mode=fetch + platform parameters
//   POST /api/v1/verify               multipart CSV + survey_id [+ revision]
//   GET  /api/v1/digests/{survey_id}  [?revision=n]
//
// 401 bad/missing token, 404 unknown survey/revision, 409 duplicate digest
// without force, 413 oversized upload, 422 malformed CSV or options,
// 500 internal.
class NomadService {
public:
    struct Config {
        std::filesystem::path store_dir;
        std::string auth_token;
        std::string host = "127.0.0.1";
        int port = 0;  // 0 = pick any free port
        std::size_t max_upload_bytes = 100 * std::size_t(1024 * 1024);
        std::filesystem::path log_path;  // empty = stderr
        // Credentials handed to the platform adapter in fetch mode.
        std::string platform_token;
        std::string platform_username;
        std::string platform_password;
    };

    explicit NomadService(Config config);
    ~NomadService();

    NomadService(const NomadService&) = delete;
    NomadService& operator=(const NomadService&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    int start();
    void stop();
    int port() const;

    // Serves on the calling thread until stop() (CLI `serve` entry point).
    void run();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Constant-time byte comparison for token checks.
bool constant_time_equal(std::string_view a, std::string_view b);

} // namespace nomad

#endif
