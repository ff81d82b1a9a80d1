#ifndef NOMAD_STORE_HPP
#define NOMAD_STORE_HPP

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nomad/digest.hpp"

namespace nomad {

struct StoredSurvey {
    std::string survey_id;
    std::vector<DigestRecord> revisions;  // revision 1 first, append-only
};

// Append-only digest store: one JSON document per survey id in a directory.
// Writes go through a temp file and an atomic rename, guarded by an
// advisory flock on <dir>/.lock, so a put either fully commits or leaves
// the prior state intact. Readers never take the lock. The store holds
// names, hashes, counts, options, timestamps — never cell data.
class DigestStore {
public:
    explicit DigestStore(std::filesystem::path dir);

    // Stores the record. A fresh survey id becomes revision 1; an existing
    // one requires force=true and is appended as the next revision.
    int put(const DigestRecord& record, bool force);

    // Latest revision when revision is omitted. 1-based.
    DigestRecord get(const std::string& survey_id,
                     std::optional<int> revision = std::nullopt) const;
    std::pair<DigestRecord, int> get_with_revision(
        const std::string& survey_id, std::optional<int> revision = std::nullopt) const;

    StoredSurvey load(const std::string& survey_id) const;
    std::vector<std::string> list() const;

    const std::filesystem::path& dir() const { return dir_; }

    // Percent-encodes anything outside [A-Za-z0-9_-] so arbitrary survey
    // ids map to safe, reversible file names.
    static std::string sanitize_survey_id(std::string_view survey_id);

private:
    std::filesystem::path survey_path(const std::string& survey_id) const;

    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;  // serializes writers sharing this handle
};

} // namespace nomad

#endif
