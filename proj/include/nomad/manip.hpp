#ifndef NOMAD_MANIP_HPP
#define NOMAD_MANIP_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nomad/csv.hpp"
#include "nomad/digest.hpp"

namespace nomad {

// The manipulation taxonomy: five deceptive table transformations plus the
// legitimate ones an honest researcher performs (redaction of identifying
// columns, deletion of extraneous fields).
enum class ManipKind {
    edit_cells,
    delete_rows,
    add_rows,
    delete_column,
    add_column,
    legitimate_redaction,
    legitimate_extraneous_deletion,
};

std::string to_string(ManipKind kind);

struct ManipulationSpec {
    ManipKind kind;
    std::vector<std::string> columns;  // targets for edit/delete/redaction
    std::vector<long> rows;            // 0-based data-row indices
    long count = 0;                    // rows to append (add_rows)
    std::vector<std::string> values;   // replacements; single value fans out
    std::string new_column_name;       // add_column; generated when empty
    std::uint64_t generator_seed = 0;  // extra entropy for generated content
};

// Applies exactly the specified transformation and returns a new table;
// the input is never mutated. Row indices refer to data rows only —
// metadata rows are untouchable. add_rows marks appended rows "Imported"
// in the profile's status column when the table has one.
CanonicalTable apply_manipulation(const CanonicalTable& table, const ManipulationSpec& spec,
                                  std::uint64_t seed);

// The toy randomized experiment: subject_id, condition (treatment/control),
// intends_to_vote (yes/no), with exact group and outcome counts and a
// seed-deterministic row shuffle.
struct ExperimentConfig {
    long n_control = 0;
    long n_treatment = 0;
    long yes_control = 0;
    long yes_treatment = 0;
    std::uint64_t seed = 0;
};

CanonicalTable generate_experiment(const ExperimentConfig& config);

// Counts (yes, n) for one condition value in an experiment table.
std::pair<long, long> count_condition(const CanonicalTable& table, const std::string& condition);

struct KindStats {
    long scenarios = 0;
    long red = 0;           // verdict RED
    long signature_ok = 0;  // kind-specific report shape also matched
};

struct ScenarioSummary {
    long n_scenarios = 0;
    std::uint64_t seed = 0;
    std::map<std::string, KindStats> deceptive;  // keyed by kind name
    long legitimate_scenarios = 0;
    long legitimate_green = 0;

    double deceptive_detection_rate() const;
    double false_positive_rate() const;
    bool all_signatures_ok() const;
};

// Detection benchmark: per scenario, generate a table, digest it, apply one
// random deceptive manipulation (column deletion is exercised as
// deletion-plus-fabricated-replacement so it carries a verdict signal on its
// own), verify, and tally RED verdicts and report signatures. Each scenario
// also runs a legitimate redaction control that must stay GREEN. Scenarios
// run in parallel with per-index derived seeds, so the summary does not
// depend on thread count or execution order.
ScenarioSummary run_scenario_suite(long n_scenarios, std::uint64_t seed);

njson summary_to_json(const ScenarioSummary& summary);

} // namespace nomad

#endif
