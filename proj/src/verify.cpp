#include "nomad/verify.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "nomad/errors.hpp"

namespace nomad {

std::string to_string(Verdict verdict) {
    return verdict == Verdict::red ? "RED" : "GREEN";
}

Verdict verdict_from_string(std::string_view text) {
    if (text == "RED") return Verdict::red;
    if (text == "GREEN") return Verdict::green;
    throw StructureError("unknown verdict '" + std::string(text) + "'");
}

std::optional<long> scan_status_imported(const CanonicalTable& candidate,
                                         const PlatformProfile& profile) {
    if (!profile.status_column_name) return std::nullopt;
    const long col = candidate.find_column(*profile.status_column_name);
    if (col < 0) return std::nullopt;
    long count = 0;
    const long rows = candidate.data_row_count();
    for (long r = 0; r < rows; ++r) {
        if (candidate.data_cell(std::size_t(col), r) == "Imported") ++count;
    }
    return count;
}

VerificationReport verify(const DigestRecord& record, const CanonicalTable& candidate,
                          int revision) {
    if (candidate.profile.header_row_count != record.header_row_count) {
        throw StructureError("candidate parsed with " +
                             std::to_string(candidate.profile.header_row_count) +
                             " header row(s) but the record was digested with " +
                             std::to_string(record.header_row_count));
    }
    if (candidate.columns.empty()) {
        throw StructureError("candidate table has no columns");
    }

    VerificationReport report;
    report.survey_id = record.survey_id;
    report.revision = revision;
    report.record_data_row_count = record.data_row_count;
    report.candidate_data_row_count = candidate.data_row_count();

    const auto candidate_hashes = hash_columns(candidate);
    std::unordered_map<std::string, std::size_t> candidate_index;
    for (std::size_t i = 0; i < candidate.columns.size(); ++i) {
        candidate_index.emplace(candidate.columns[i].name, i);
    }

    std::unordered_set<std::string> record_names;
    for (const auto& entry : record.columns) {
        record_names.insert(entry.name);
        auto it = candidate_index.find(entry.name);
        if (it == candidate_index.end()) {
            report.removed.push_back(entry.name);
        } else if (candidate_hashes[it->second] != entry.hash) {
            report.modified.push_back(entry.name);
        } else {
            ++report.unchanged_count;
        }
    }
    for (const auto& column : candidate.columns) {
        if (!record_names.count(column.name)) {
            report.added.push_back(column.name);
        }
    }

    // Relative order of the columns present on both sides.
    std::vector<std::string> record_common;
    for (const auto& entry : record.columns) {
        if (candidate_index.count(entry.name)) record_common.push_back(entry.name);
    }
    std::vector<std::string> candidate_common;
    for (const auto& column : candidate.columns) {
        if (record_names.count(column.name)) candidate_common.push_back(column.name);
    }
    report.column_order_changed = record_common != candidate_common;

    report.imported_row_count = scan_status_imported(candidate, candidate.profile);
    if (candidate.profile.status_column_name && !report.imported_row_count &&
        record.find_column(*candidate.profile.status_column_name) >= 0) {
        report.warnings.push_back("status column '" + *candidate.profile.status_column_name +
                                  "' was deleted from the candidate; imported-row scan skipped");
    }

    report.verdict = (!report.added.empty() || !report.modified.empty()) ? Verdict::red
                                                                         : Verdict::green;
    return report;
}

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

} // namespace

std::string render_report(const VerificationReport& report, ReportFormat format) {
    if (format == ReportFormat::structured) {
        return report_to_json(report).dump(2) + "\n";
    }

    std::ostringstream out;
    if (report.removed.empty() && report.added.empty() && report.modified.empty()) {
        out << "No changes detected.\n";
    } else {
        out << "Changes detected.\n";
        if (!report.removed.empty()) {
            out << "  - Removed columns: " << join(report.removed) << "\n";
        }
        if (!report.added.empty()) {
            out << "  - Added columns: " << join(report.added) << "\n";
        }
        if (!report.modified.empty()) {
            out << "  - Modified columns: " << join(report.modified) << "\n";
        }
    }

    out << "\n";
    out << "Survey:       " << report.survey_id;
    if (report.revision > 0) out << " (revision " << report.revision << ")";
    out << "\n";
    out << "Verdict:      " << to_string(report.verdict) << "\n";
    out << "Columns:      " << report.unchanged_count << " unchanged";
    if (!report.removed.empty()) out << ", " << report.removed.size() << " removed";
    if (!report.added.empty()) out << ", " << report.added.size() << " added";
    if (!report.modified.empty()) out << ", " << report.modified.size() << " modified";
    out << "\n";
    out << "Data rows:    " << report.record_data_row_count << " recorded, "
        << report.candidate_data_row_count << " in candidate\n";
    if (report.imported_row_count) {
        out << "Imported:     " << *report.imported_row_count << " row(s) marked Imported\n";
    }
    if (report.column_order_changed) {
        out << "Note:         column order changed (informational)\n";
    }
    for (const auto& warning : report.warnings) {
        out << "Warning:      " << warning << "\n";
    }
    return out.str();
}

njson report_to_json(const VerificationReport& report) {
    njson j;
    j["survey_id"] = report.survey_id;
    j["revision"] = report.revision;
    j["verdict"] = to_string(report.verdict);
    j["removed"] = report.removed;
    j["added"] = report.added;
    j["modified"] = report.modified;
    j["unchanged_count"] = report.unchanged_count;
    j["record_data_row_count"] = report.record_data_row_count;
    j["candidate_data_row_count"] = report.candidate_data_row_count;
    j["imported_row_count"] =
        report.imported_row_count ? njson(*report.imported_row_count) : njson(nullptr);
    j["column_order_changed"] = report.column_order_changed;
    j["warnings"] = report.warnings;
    return j;
}

VerificationReport report_from_json(const njson& j) {
    try {
        VerificationReport report;
        report.survey_id = j.at("survey_id").get<std::string>();
        report.revision = j.at("revision").get<int>();
        report.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        report.removed = j.at("removed").get<std::vector<std::string>>();
        report.added = j.at("added").get<std::vector<std::string>>();
        report.modified = j.at("modified").get<std::vector<std::string>>();
        report.unchanged_count = j.at("unchanged_count").get<long>();
        report.record_data_row_count = j.at("record_data_row_count").get<long>();
        report.candidate_data_row_count = j.at("candidate_data_row_count").get<long>();
        if (!j.at("imported_row_count").is_null()) {
            report.imported_row_count = j["imported_row_count"].get<long>();
        }
        report.column_order_changed = j.at("column_order_changed").get<bool>();
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const njson::exception& e) {
        throw StructureError(std::string("malformed verification report: ") + e.what());
    }
}

} // namespace nomad
