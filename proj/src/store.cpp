#include "nomad/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nomad/errors.hpp"

namespace nomad {

namespace {

constexpr int kStoreFormatVersion = 1;

// RAII flock holder; the advisory lock enforces the one-writer-at-a-time
// contract across processes sharing a store directory.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) {
            throw IoError("cannot open lock file " + path.string());
        }
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw IoError("cannot lock " + path.string());
        }
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    const int fd = ::open(tmp.c_str(), O_CREAT | O_TRUNC | O_WRONLY | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw IoError("cannot create " + tmp.string());
    }
    std::size_t written = 0;
    while (written < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            ::close(fd);
            ::unlink(tmp.c_str());
            throw IoError("write failed for " + tmp.string());
        }
        written += std::size_t(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        ::unlink(tmp.c_str());
        throw IoError("fsync failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        ::unlink(tmp.c_str());
        throw IoError("rename failed for " + path.string() + ": " + ec.message());
    }
}

njson load_survey_doc(const std::filesystem::path& path) {
    try {
        return njson::parse(read_file(path));
    } catch (const njson::exception& e) {
        throw StructureError("corrupt store document " + path.string() + ": " + e.what());
    }
}

} // namespace

DigestStore::DigestStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
        throw IoError("cannot create store directory " + dir_.string());
    }
}

std::string DigestStore::sanitize_survey_id(std::string_view survey_id) {
    static constexpr char kHexDigits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(survey_id.size());
    for (unsigned char c : survey_id) {
        const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                          (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (safe) {
            out.push_back(char(c));
        } else {
            out.push_back('%');
            out.push_back(kHexDigits[c >> 4]);
            out.push_back(kHexDigits[c & 0x0f]);
        }
    }
    return out;
}

std::filesystem::path DigestStore::survey_path(const std::string& survey_id) const {
    return dir_ / (sanitize_survey_id(survey_id) + ".json");
}

int DigestStore::put(const DigestRecord& record, bool force) {
    if (record.survey_id.empty()) {
        throw ConfigError("record has empty survey id");
    }
    std::lock_guard<std::mutex> guard(write_mutex_);
    FileLock lock(dir_ / ".lock");

    const auto path = survey_path(record.survey_id);
    njson doc;
    if (std::filesystem::exists(path)) {
        if (!force) {
            throw DuplicateError("survey '" + record.survey_id +
                                 "' already digested; pass force to append a new revision");
        }
        doc = load_survey_doc(path);
    } else {
        doc["format_version"] = kStoreFormatVersion;
        doc["survey_id"] = record.survey_id;
        doc["revisions"] = njson::array();
    }

    // Existing revisions are re-emitted from their parsed JSON untouched;
    // only the new entry is appended.
    doc["revisions"].push_back(record_to_json(record));
    write_file_atomic(path, doc.dump(2) + "\n");
    return int(doc["revisions"].size());
}

StoredSurvey DigestStore::load(const std::string& survey_id) const {
    const auto path = survey_path(survey_id);
    if (!std::filesystem::exists(path)) {
        throw NotFoundError("no digest stored for survey '" + survey_id + "'");
    }
    const njson doc = load_survey_doc(path);
    StoredSurvey survey;
    try {
        survey.survey_id = doc.at("survey_id").get<std::string>();
        for (const auto& rev : doc.at("revisions")) {
            survey.revisions.push_back(record_from_json(rev));
        }
    } catch (const njson::exception& e) {
        throw StructureError("corrupt store document " + path.string() + ": " + e.what());
    }
    if (survey.revisions.empty()) {
        throw StructureError("store document " + path.string() + " has no revisions");
    }
    return survey;
}

std::pair<DigestRecord, int> DigestStore::get_with_revision(const std::string& survey_id,
                                                            std::optional<int> revision) const {
    StoredSurvey survey = load(survey_id);
    const int n = int(survey.revisions.size());
    const int wanted = revision.value_or(n);
    if (wanted < 1 || wanted > n) {
        throw NotFoundError("survey '" + survey_id + "' has no revision " +
                            std::to_string(wanted));
    }
    return {std::move(survey.revisions[std::size_t(wanted - 1)]), wanted};
}

DigestRecord DigestStore::get(const std::string& survey_id, std::optional<int> revision) const {
    return get_with_revision(survey_id, revision).first;
}

std::vector<std::string> DigestStore::list() const {
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        try {
            const njson doc = load_survey_doc(entry.path());
            ids.push_back(doc.at("survey_id").get<std::string>());
        } catch (const std::exception&) {
            // Skip foreign files; the store only claims its own documents.
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace nomad
