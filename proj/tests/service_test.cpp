#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "nomad/digest.hpp"
#include "nomad/errors.hpp"
#include "nomad/mock_platform.hpp"
#include "nomad/service.hpp"
#include "paper_example.hpp"
#include "test_helpers.hpp"

using nomad::njson;
using nomad::NomadService;

namespace {

constexpr const char* kToken = "sekrit-bearer";

NomadService::Config service_config(const helpers::TempDir& dir) {
    NomadService::Config config;
    config.store_dir = dir.file("store");
    config.log_path = dir.file("service.log");
    config.auth_token = kToken;
    return config;
}

httplib::Client client_for(int port) {
    httplib::Client http("127.0.0.1", port);
    http.set_default_headers({{"Authorization", std::string("Bearer ") + kToken}});
    return http;
}

httplib::MultipartFormDataItems digest_form(const std::string& survey_id,
                                            const std::string& csv,
                                            const std::string& force = "") {
    httplib::MultipartFormDataItems items = {
        {"survey_id", survey_id, "", ""},
        {"platform", "qualtrics", "", ""},
        {"file", csv, "export.csv", "text/csv"},
    };
    if (!force.empty()) items.push_back({"force", force, "", ""});
    return items;
}

std::string scan_directory(const std::filesystem::path& dir) {
    std::string all;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) all += helpers::read_file(entry.path());
    }
    return all;
}

} // namespace

TEST_CASE("digest upload, duplicate handling, fetch-back") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    auto http = client_for(service.start());

    auto created = http.Post("/api/v1/digests",
                             digest_form(paper_example::kSurveyId, paper_example::csv_text()));
    REQUIRE(created);
    REQUIRE(created->status == 201);
    const njson body = njson::parse(created->body);
    CHECK(body["revision"] == 1);
    CHECK(body["record"]["data_row_count"] == 4);
    CHECK(body["record"]["columns"].size() == 14);

    auto duplicate = http.Post(
        "/api/v1/digests", digest_form(paper_example::kSurveyId, paper_example::csv_text()));
    REQUIRE(duplicate);
    CHECK(duplicate->status == 409);

    auto forced = http.Post("/api/v1/digests",
                            digest_form(paper_example::kSurveyId, paper_example::csv_text(),
                                        "true"));
    REQUIRE(forced);
    CHECK(forced->status == 201);
    CHECK(njson::parse(forced->body)["revision"] == 2);

    auto fetched = http.Get("/api/v1/digests/" + std::string(paper_example::kSurveyId));
    REQUIRE(fetched);
    CHECK(fetched->status == 200);
    CHECK(njson::parse(fetched->body)["revision"] == 2);

    auto first = http.Get("/api/v1/digests/" + std::string(paper_example::kSurveyId) +
                          "?revision=1");
    REQUIRE(first);
    CHECK(njson::parse(first->body)["revision"] == 1);

    auto missing = http.Get("/api/v1/digests/SV_unknown");
    REQUIRE(missing);
    CHECK(missing->status == 404);
}

TEST_CASE("verify endpoint returns structured reports") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    auto http = client_for(service.start());

    REQUIRE(http.Post("/api/v1/digests",
                      digest_form(paper_example::kSurveyId, paper_example::csv_text()))
                ->status == 201);

    SUBCASE("untouched archive is GREEN") {
        auto res = http.Post("/api/v1/verify",
                             httplib::MultipartFormDataItems{
                                 {"survey_id", paper_example::kSurveyId, "", ""},
                                 {"file", paper_example::csv_text(), "archive.csv", "text/csv"},
                             });
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const njson report = njson::parse(res->body);
        CHECK(report["verdict"] == "GREEN");
        CHECK(report["removed"].empty());
        CHECK(report["revision"] == 1);
    }

    SUBCASE("tampered archive is RED with the modified column named") {
        std::string tampered = paper_example::csv_text();
        const auto pos = tampered.find("green");
        tampered.replace(pos, 5, "brown");
        auto res = http.Post("/api/v1/verify",
                             httplib::MultipartFormDataItems{
                                 {"survey_id", paper_example::kSurveyId, "", ""},
                                 {"file", tampered, "archive.csv", "text/csv"},
                             });
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const njson report = njson::parse(res->body);
        CHECK(report["verdict"] == "RED");
        CHECK(report["modified"] == njson::array({"color"}));
    }

    SUBCASE("unknown survey is 404") {
        auto res = http.Post("/api/v1/verify",
                             httplib::MultipartFormDataItems{
                                 {"survey_id", "SV_unknown", "", ""},
                                 {"file", paper_example::csv_text(), "a.csv", "text/csv"},
                             });
        REQUIRE(res);
        CHECK(res->status == 404);
    }
}

TEST_CASE("authentication is enforced with a constant-time comparison") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    const int port = service.start();

    httplib::Client anonymous("127.0.0.1", port);
    auto res = anonymous.Get("/api/v1/digests/SV_x");
    REQUIRE(res);
    CHECK(res->status == 401);

    httplib::Client wrong("127.0.0.1", port);
    wrong.set_default_headers({{"Authorization", "Bearer nope"}});
    res = wrong.Get("/api/v1/digests/SV_x");
    REQUIRE(res);
    CHECK(res->status == 401);

    CHECK(nomad::constant_time_equal("abc", "abc"));
    CHECK(!nomad::constant_time_equal("abc", "abd"));
    CHECK(!nomad::constant_time_equal("abc", "abcd"));
    CHECK(!nomad::constant_time_equal("", "x"));
    CHECK(nomad::constant_time_equal("", ""));
}

TEST_CASE("malformed uploads and options are 422") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    auto http = client_for(service.start());

    auto bad_csv = http.Post("/api/v1/digests", digest_form("SV_x", "a,b\r\n\"broken\r\n"));
    REQUIRE(bad_csv);
    CHECK(bad_csv->status == 422);

    auto no_id = http.Post("/api/v1/digests",
                           httplib::MultipartFormDataItems{
                               {"file", "a\r\n1\r\n", "x.csv", "text/csv"},
                           });
    REQUIRE(no_id);
    CHECK(no_id->status == 422);

    auto no_file = http.Post("/api/v1/digests", httplib::MultipartFormDataItems{
                                                    {"survey_id", "SV_x", "", ""},
                                                });
    REQUIRE(no_file);
    CHECK(no_file->status == 422);
}

TEST_CASE("uploads above the cap are rejected with 413") {
    helpers::TempDir dir("service");
    NomadService::Config config = service_config(dir);
    config.max_upload_bytes = 2048;
    NomadService service(std::move(config));
    auto http = client_for(service.start());

    const std::string big(8192, 'x');
    auto res = http.Post("/api/v1/digests", digest_form("SV_big", big));
    REQUIRE(res);
    CHECK(res->status == 413);
}

TEST_CASE("no sentinel cell bytes reach the store or the log") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    auto http = client_for(service.start());

    const std::string sentinel = "ZQSENTINEL_PAYLOAD_93511";
    const std::string csv = "name,secret\r\nRobert," + sentinel + "\r\n";
    auto res = http.Post("/api/v1/digests",
                         httplib::MultipartFormDataItems{
                             {"survey_id", "SV_leak", "", ""},
                             {"platform", "local", "", ""},
                             {"file", csv, "x.csv", "text/csv"},
                         });
    REQUIRE(res);
    REQUIRE(res->status == 201);
    auto verify_res = http.Post("/api/v1/verify",
                                httplib::MultipartFormDataItems{
                                    {"survey_id", "SV_leak", "", ""},
                                    {"file", csv, "x.csv", "text/csv"},
                                });
    REQUIRE(verify_res);
    REQUIRE(verify_res->status == 200);
    service.stop();

    CHECK(scan_directory(dir.file("store")).find(sentinel) == std::string::npos);
    CHECK(helpers::read_file(dir.file("service.log")).find(sentinel) == std::string::npos);
    // The log did record the requests themselves.
    CHECK(helpers::read_file(dir.file("service.log")).find("/api/v1/digests") !=
          std::string::npos);
}

TEST_CASE("fetch mode digests straight from the platform") {
    helpers::TempDir dir("service");
    nomad::MockPlatformServer::Config mock_config;
    mock_config.api_token = "platform-tok";
    nomad::MockPlatformServer platform(
        mock_config,
        {{"SV_remote", nomad::MockFixture{"a,b\r\n1,2\r\n", "a,b\r\n9,2\r\n"}}});

    NomadService::Config config = service_config(dir);
    config.platform_token = "platform-tok";
    NomadService service(std::move(config));
    auto http = client_for(service.start());

    auto res = http.Post("/api/v1/digests",
                         httplib::MultipartFormDataItems{
                             {"survey_id", "SV_remote", "", ""},
                             {"platform", "qualtrics", "", ""},
                             {"header_row_count", "1", "", ""},
                             {"mode", "fetch", "", ""},
                             {"base_url", platform.base_url(), "", ""},
                         });
    REQUIRE(res);
    REQUIRE(res->status == 201);
    CHECK(njson::parse(res->body)["record"]["columns"].size() == 2);
}

TEST_CASE("concurrent verifies against one record are independent") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    const int port = service.start();

    REQUIRE(client_for(port)
                .Post("/api/v1/digests",
                      digest_form(paper_example::kSurveyId, paper_example::csv_text()))
                ->status == 201);

    std::atomic<int> green{0};
    auto worker = [&] {
        auto http = client_for(port);
        for (int i = 0; i < 5; ++i) {
            auto res = http.Post("/api/v1/verify",
                                 httplib::MultipartFormDataItems{
                                     {"survey_id", paper_example::kSurveyId, "", ""},
                                     {"file", paper_example::csv_text(), "a.csv", "text/csv"},
                                 });
            if (res && res->status == 200 &&
                njson::parse(res->body)["verdict"] == "GREEN") {
                ++green;
            }
        }
    };
    std::thread a(worker), b(worker), c(worker);
    a.join();
    b.join();
    c.join();
    CHECK(green == 15);
}

TEST_CASE("concurrent forced digests land as distinct revisions") {
    helpers::TempDir dir("service");
    NomadService service(service_config(dir));
    const int port = service.start();

    REQUIRE(client_for(port)
                .Post("/api/v1/digests",
                      digest_form(paper_example::kSurveyId, paper_example::csv_text()))
                ->status == 201);

    std::atomic<int> created{0};
    auto worker = [&] {
        auto http = client_for(port);
        auto res = http.Post("/api/v1/digests",
                             digest_form(paper_example::kSurveyId, paper_example::csv_text(),
                                         "true"));
        if (res && res->status == 201) ++created;
    };
    std::thread a(worker), b(worker);
    a.join();
    b.join();
    CHECK(created == 2);

    auto http = client_for(port);
    auto res = http.Get("/api/v1/digests/" + std::string(paper_example::kSurveyId));
    REQUIRE(res);
    CHECK(njson::parse(res->body)["revision"] == 3);
}
