#include "nomad/manip.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "nomad/errors.hpp"
#include "nomad/seeded_rng.hpp"
#include "nomad/verify.hpp"

namespace nomad {

std::string to_string(ManipKind kind) {
    switch (kind) {
    case ManipKind::edit_cells: return "edit_cells";
    case ManipKind::delete_rows: return "delete_rows";
    case ManipKind::add_rows: return "add_rows";
    case ManipKind::delete_column: return "delete_column";
    case ManipKind::add_column: return "add_column";
    case ManipKind::legitimate_redaction: return "legitimate_redaction";
    case ManipKind::legitimate_extraneous_deletion: return "legitimate_extraneous_deletion";
    }
    return "unknown";
}

namespace {

long require_column(const CanonicalTable& table, const std::string& name) {
    const long idx = table.find_column(name);
    if (idx < 0) {
        throw ConfigError("manipulation targets nonexistent column '" + name + "'");
    }
    return idx;
}

void require_data_row(const CanonicalTable& table, long row) {
    if (row < 0 || row >= table.data_row_count()) {
        throw ConfigError("manipulation targets nonexistent data row " + std::to_string(row));
    }
}

CanonicalTable delete_columns(const CanonicalTable& table,
                              const std::vector<std::string>& names) {
    CanonicalTable out = table;
    for (const auto& name : names) {
        const long idx = require_column(out, name);
        out.columns.erase(out.columns.begin() + idx);
    }
    return out;
}

} // namespace

CanonicalTable apply_manipulation(const CanonicalTable& table, const ManipulationSpec& spec,
                                  std::uint64_t seed) {
    SeededRng rng(derive_seed(seed, spec.generator_seed));
    CanonicalTable out = table;

    switch (spec.kind) {
    case ManipKind::edit_cells: {
        if (spec.columns.size() != 1) {
            throw ConfigError("edit_cells takes exactly one column");
        }
        const long col = require_column(out, spec.columns.front());
        if (spec.rows.empty()) {
            throw ConfigError("edit_cells requires at least one row index");
        }
        if (!spec.values.empty() && spec.values.size() != 1 &&
            spec.values.size() != spec.rows.size()) {
            throw ConfigError("edit_cells values must be one value or one per row");
        }
        for (std::size_t i = 0; i < spec.rows.size(); ++i) {
            require_data_row(out, spec.rows[i]);
            std::string value;
            if (spec.values.empty()) {
                value = rng.token("v_");
            } else {
                value = spec.values.size() == 1 ? spec.values.front() : spec.values[i];
            }
            out.data_cell(std::size_t(col), spec.rows[i]) = value;
        }
        break;
    }
    case ManipKind::delete_rows: {
        if (spec.rows.empty()) {
            throw ConfigError("delete_rows requires at least one row index");
        }
        std::set<long> doomed;
        for (long row : spec.rows) {
            require_data_row(out, row);
            doomed.insert(row);
        }
        const long meta = out.metadata_row_count();
        for (auto& column : out.columns) {
            std::vector<std::string> kept;
            kept.reserve(column.cells.size() - doomed.size());
            for (std::size_t i = 0; i < column.cells.size(); ++i) {
                const long data_row = long(i) - meta;
                if (data_row >= 0 && doomed.count(data_row)) continue;
                kept.push_back(std::move(column.cells[i]));
            }
            column.cells = std::move(kept);
        }
        break;
    }
    case ManipKind::add_rows: {
        if (spec.count < 1) {
            throw ConfigError("add_rows requires count >= 1");
        }
        const auto& status_name = out.profile.status_column_name;
        const long status_col = status_name ? out.find_column(*status_name) : -1;
        for (long r = 0; r < spec.count; ++r) {
            for (std::size_t c = 0; c < out.columns.size(); ++c) {
                std::string value =
                    (long(c) == status_col) ? "Imported" : rng.token("r_");
                out.columns[c].cells.push_back(std::move(value));
            }
        }
        break;
    }
    case ManipKind::delete_column:
    case ManipKind::legitimate_redaction:
    case ManipKind::legitimate_extraneous_deletion: {
        if (spec.columns.empty()) {
            throw ConfigError(to_string(spec.kind) + " requires at least one column name");
        }
        out = delete_columns(out, spec.columns);
        break;
    }
    case ManipKind::add_column: {
        std::string name =
            spec.new_column_name.empty() ? rng.token("var_") : spec.new_column_name;
        if (out.find_column(name) >= 0) {
            throw ConfigError("add_column name '" + name + "' already exists");
        }
        Column fabricated;
        fabricated.name = std::move(name);
        const std::size_t total =
            out.columns.empty() ? 0 : out.columns.front().cells.size();
        const long meta = out.metadata_row_count();
        fabricated.cells.reserve(total);
        for (std::size_t i = 0; i < total; ++i) {
            // Dichotomous fabricated variable; header metadata stays blank.
            fabricated.cells.push_back(long(i) < meta ? "" : (rng.below(2) ? "1" : "0"));
        }
        out.columns.push_back(std::move(fabricated));
        break;
    }
    }
    return out;
}

CanonicalTable generate_experiment(const ExperimentConfig& config) {
    if (config.n_control < 0 || config.n_treatment < 0 ||
        config.n_control + config.n_treatment < 1) {
        throw ConfigError("experiment needs at least one subject");
    }
    if (config.yes_control < 0 || config.yes_control > config.n_control ||
        config.yes_treatment < 0 || config.yes_treatment > config.n_treatment) {
        throw ConfigError("yes counts must lie within group sizes");
    }

    struct Row {
        const char* condition;
        const char* vote;
    };
    std::vector<Row> rows;
    rows.reserve(std::size_t(config.n_control + config.n_treatment));
    for (long i = 0; i < config.n_control; ++i) {
        rows.push_back({"control", i < config.yes_control ? "yes" : "no"});
    }
    for (long i = 0; i < config.n_treatment; ++i) {
        rows.push_back({"treatment", i < config.yes_treatment ? "yes" : "no"});
    }

    // Fisher–Yates with our own bounded draws: identical order everywhere.
    SeededRng rng(config.seed);
    for (std::size_t i = rows.size(); i > 1; --i) {
        std::swap(rows[i - 1], rows[std::size_t(rng.below(i))]);
    }

    CanonicalTable table;
    table.profile = PlatformProfile{"local", 1, std::nullopt, std::nullopt};
    table.columns = {Column{"subject_id", {}}, Column{"condition", {}},
                     Column{"intends_to_vote", {}}};
    char id[24];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::snprintf(id, sizeof id, "S%04zu", i + 1);
        table.columns[0].cells.emplace_back(id);
        table.columns[1].cells.emplace_back(rows[i].condition);
        table.columns[2].cells.emplace_back(rows[i].vote);
    }
    return table;
}

std::pair<long, long> count_condition(const CanonicalTable& table,
                                      const std::string& condition) {
    const long cond_col = require_column(table, "condition");
    const long vote_col = require_column(table, "intends_to_vote");
    long yes = 0, n = 0;
    const long rows = table.data_row_count();
    for (long r = 0; r < rows; ++r) {
        if (table.data_cell(std::size_t(cond_col), r) != condition) continue;
        ++n;
        if (table.data_cell(std::size_t(vote_col), r) == "yes") ++yes;
    }
    return {yes, n};
}

double ScenarioSummary::deceptive_detection_rate() const {
    long total = 0, red = 0;
    for (const auto& [kind, stats] : deceptive) {
        total += stats.scenarios;
        red += stats.red;
    }
    return total == 0 ? 0.0 : double(red) / double(total);
}

double ScenarioSummary::false_positive_rate() const {
    return legitimate_scenarios == 0
               ? 0.0
               : double(legitimate_scenarios - legitimate_green) / double(legitimate_scenarios);
}

bool ScenarioSummary::all_signatures_ok() const {
    for (const auto& [kind, stats] : deceptive) {
        if (stats.signature_ok != stats.scenarios) return false;
    }
    return true;
}

namespace {

constexpr int kDeceptiveKinds = 5;

struct ScenarioOutcome {
    int kind_index;
    bool red;
    bool signature_ok;
    bool legit_green;
};

bool same_names(const std::vector<std::string>& got, const std::vector<std::string>& want) {
    if (got.size() != want.size()) return false;
    auto a = got;
    auto b = want;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

std::vector<std::string> all_record_names(const DigestRecord& record) {
    std::vector<std::string> names;
    names.reserve(record.columns.size());
    for (const auto& entry : record.columns) names.push_back(entry.name);
    return names;
}

ScenarioOutcome run_one_scenario(std::uint64_t scenario_seed) {
    SeededRng rng(scenario_seed);

    ExperimentConfig config;
    config.n_control = rng.range(10, 60);
    config.n_treatment = rng.range(10, 60);
    config.yes_control = rng.range(0, config.n_control);
    config.yes_treatment = rng.range(0, config.n_treatment);
    config.seed = rng.next();
    CanonicalTable table = generate_experiment(config);

    const auto digest = digest_table(table, DigestOptions{"scenario", false, std::nullopt});
    const DigestRecord& record = digest.record;

    ScenarioOutcome outcome{};
    outcome.kind_index = int(rng.below(kDeceptiveKinds));
    const long data_rows = table.data_row_count();
    const auto column_names = table.column_names();

    CanonicalTable tampered = table;
    std::vector<std::string> expect_removed, expect_added, expect_modified;
    bool expect_rowcount_mismatch = false;

    switch (outcome.kind_index) {
    case 0: {  // edit_cells
        ManipulationSpec spec;
        spec.kind = ManipKind::edit_cells;
        spec.columns = {column_names[std::size_t(rng.below(column_names.size()))]};
        spec.rows = {rng.range(0, data_rows - 1)};
        spec.values = {rng.token("forged_")};
        tampered = apply_manipulation(table, spec, rng.next());
        expect_modified = spec.columns;
        break;
    }
    case 1: {  // delete_rows
        ManipulationSpec spec;
        spec.kind = ManipKind::delete_rows;
        const long how_many = rng.range(1, std::min<long>(5, data_rows));
        std::set<long> picks;
        while (long(picks.size()) < how_many) picks.insert(rng.range(0, data_rows - 1));
        spec.rows.assign(picks.begin(), picks.end());
        tampered = apply_manipulation(table, spec, rng.next());
        expect_modified = column_names;
        expect_rowcount_mismatch = true;
        break;
    }
    case 2: {  // add_rows
        ManipulationSpec spec;
        spec.kind = ManipKind::add_rows;
        spec.count = rng.range(1, 5);
        tampered = apply_manipulation(table, spec, rng.next());
        expect_modified = column_names;
        expect_rowcount_mismatch = true;
        break;
    }
    case 3: {  // delete_column exercised as deletion/replacement
        ManipulationSpec del;
        del.kind = ManipKind::delete_column;
        del.columns = {column_names[std::size_t(rng.below(column_names.size()))]};
        ManipulationSpec add;
        add.kind = ManipKind::add_column;
        add.new_column_name = rng.token("plausible_");
        tampered = apply_manipulation(apply_manipulation(table, del, rng.next()), add,
                                      rng.next());
        expect_removed = del.columns;
        expect_added = {add.new_column_name};
        break;
    }
    case 4: {  // add_column
        ManipulationSpec spec;
        spec.kind = ManipKind::add_column;
        spec.new_column_name = rng.token("var_");
        tampered = apply_manipulation(table, spec, rng.next());
        expect_added = {spec.new_column_name};
        break;
    }
    }

    const VerificationReport report = verify(record, tampered);
    outcome.red = report.verdict == Verdict::red;
    bool signature = same_names(report.removed, expect_removed) &&
                     same_names(report.added, expect_added) &&
                     same_names(report.modified, expect_modified);
    if (expect_rowcount_mismatch) {
        signature = signature &&
                    report.candidate_data_row_count != report.record_data_row_count &&
                    same_names(report.modified, all_record_names(record));
    }
    outcome.signature_ok = signature && outcome.red;

    // Legitimate control: redact a strict subset of columns, nothing else.
    ManipulationSpec redaction;
    redaction.kind = ManipKind::legitimate_redaction;
    redaction.columns = {column_names[std::size_t(rng.below(column_names.size() - 1))]};
    const CanonicalTable redacted = apply_manipulation(table, redaction, rng.next());
    const VerificationReport control = verify(record, redacted);
    outcome.legit_green = control.verdict == Verdict::green &&
                          same_names(control.removed, redaction.columns) &&
                          control.added.empty() && control.modified.empty();
    return outcome;
}

} // namespace

ScenarioSummary run_scenario_suite(long n_scenarios, std::uint64_t seed) {
    if (n_scenarios < 1) {
        throw ConfigError("scenario count must be >= 1");
    }

    std::vector<ScenarioOutcome> outcomes(static_cast<std::size_t>(n_scenarios));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < n_scenarios; ++i) {
        outcomes[std::size_t(i)] = run_one_scenario(derive_seed(seed, std::uint64_t(i)));
    }

    ScenarioSummary summary;
    summary.n_scenarios = n_scenarios;
    summary.seed = seed;
    static const ManipKind kKinds[kDeceptiveKinds] = {
        ManipKind::edit_cells, ManipKind::delete_rows, ManipKind::add_rows,
        ManipKind::delete_column, ManipKind::add_column};
    for (const auto& outcome : outcomes) {
        KindStats& stats = summary.deceptive[to_string(kKinds[outcome.kind_index])];
        ++stats.scenarios;
        if (outcome.red) ++stats.red;
        if (outcome.signature_ok) ++stats.signature_ok;
        ++summary.legitimate_scenarios;
        if (outcome.legit_green) ++summary.legitimate_green;
    }
    return summary;
}

njson summary_to_json(const ScenarioSummary& summary) {
    njson j;
    j["n_scenarios"] = summary.n_scenarios;
    j["seed"] = summary.seed;
    njson kinds = njson::object();
    for (const auto& [kind, stats] : summary.deceptive) {
        njson k;
        k["scenarios"] = stats.scenarios;
        k["red"] = stats.red;
        k["signature_ok"] = stats.signature_ok;
        k["detection_rate"] =
            stats.scenarios == 0 ? 0.0 : double(stats.red) / double(stats.scenarios);
        kinds[kind] = std::move(k);
    }
    j["deceptive"] = std::move(kinds);
    j["deceptive_detection_rate"] = summary.deceptive_detection_rate();
    j["legitimate_scenarios"] = summary.legitimate_scenarios;
    j["legitimate_green"] = summary.legitimate_green;
    j["false_positive_rate"] = summary.false_positive_rate();
    return j;
}

} // namespace nomad
