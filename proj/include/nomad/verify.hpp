#ifndef NOMAD_VERIFY_HPP
#define NOMAD_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "nomad/csv.hpp"
#include "nomad/digest.hpp"

namespace nomad {

enum class Verdict { green, red };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

// Outcome of comparing a candidate table against a stored record.
// removed/added/modified are pairwise disjoint;
// unchanged_count + |modified| + |removed| == record column count;
// verdict is RED iff added or modified is non-empty — removed columns are
// listed for human judgment and never escalate on their own.
struct VerificationReport {
    std::string survey_id;
    int revision = 0;
    std::vector<std::string> removed;   // record order
    std::vector<std::string> added;     // candidate order
    std::vector<std::string> modified;  // record order
    long unchanged_count = 0;
    long record_data_row_count = 0;
    long candidate_data_row_count = 0;
    std::optional<long> imported_row_count;
    bool column_order_changed = false;
    Verdict verdict = Verdict::green;
    std::vector<std::string> warnings;

    bool operator==(const VerificationReport&) const = default;
};

// Counts data-row cells exactly equal to "Imported" in the profile's status
// column. Absent when the profile has no status convention or the column is
// missing from the candidate.
std::optional<long> scan_status_imported(const CanonicalTable& candidate,
                                         const PlatformProfile& profile);

// Compares the candidate's column hashes against the record. The candidate
// must have been parsed with the record's header depth (structure error
// otherwise). revision is carried into the report for display.
VerificationReport verify(const DigestRecord& record, const CanonicalTable& candidate,
                          int revision = 0);

enum class ReportFormat { text, structured };

std::string render_report(const VerificationReport& report, ReportFormat format);

njson report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const njson& j);

} // namespace nomad

#endif
