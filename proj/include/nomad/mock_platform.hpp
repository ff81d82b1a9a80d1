#ifndef NOMAD_MOCK_PLATFORM_HPP
#define NOMAD_MOCK_PLATFORM_HPP

#include <atomic>
#include <map>
#include <memory>
#include <string>

namespace nomad {

// A survey fixture: the pristine export and an in-platform-edited variant.
// fetch_unedited=true serves the original, false the edited one.
struct MockFixture {
    std::string original_csv;
    std::string edited_csv;
};

// In-process survey platform implementing the documented export protocol,
// for tests and offline demos:
//   qualtrics-style  POST /export  -> {"jobId"}            (X-API-TOKEN auth)
//                    GET  /export/{jobId} -> {"status", "fileId"?}
//                    GET  /file/{fileId}  -> zip with one CSV
//   surveycto-style  GET  /data/csv/{survey_id}?dataMode=… (basic auth)
class MockPlatformServer {
public:
    struct Config {
        std::string api_token = "test-token";
        std::string username = "collector";
        std::string password = "secret";
        int polls_until_complete = 1;  // the (n+1)-th poll reports complete
        int fail_downloads = 0;  // serve this many 500s on /file/ first
    };

    MockPlatformServer(Config config, std::map<std::string, MockFixture> fixtures);
    ~MockPlatformServer();

    MockPlatformServer(const MockPlatformServer&) = delete;
    MockPlatformServer& operator=(const MockPlatformServer&) = delete;

    int port() const;
    std::string base_url() const;
    void stop();

    // Request counters for asserting retry behavior.
    int start_calls() const;
    int poll_calls() const;
    int download_calls() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace nomad

#endif
