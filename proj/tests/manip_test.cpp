#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nomad/errors.hpp"
#include "nomad/manip.hpp"
#include "nomad/stats.hpp"
#include "nomad/verify.hpp"
#include "paper_example.hpp"
#include "test_helpers.hpp"

using nomad::apply_manipulation;
using nomad::CanonicalTable;
using nomad::count_condition;
using nomad::ExperimentConfig;
using nomad::generate_experiment;
using nomad::ManipKind;
using nomad::ManipulationSpec;

TEST_CASE("experiment generation hits the configured counts") {
    const CanonicalTable table = generate_experiment({48, 52, 32, 40, 1});
    CHECK(table.data_row_count() == 100);
    CHECK(count_condition(table, "control") == std::pair<long, long>(32, 48));
    CHECK(count_condition(table, "treatment") == std::pair<long, long>(40, 52));

    const CanonicalTable tiny = generate_experiment({1, 1, 1, 1, 9});
    CHECK(tiny.data_row_count() == 2);
    CHECK(count_condition(tiny, "control") == std::pair<long, long>(1, 1));
    CHECK(count_condition(tiny, "treatment") == std::pair<long, long>(1, 1));
}

TEST_CASE("generation is seed-deterministic") {
    const ExperimentConfig config{30, 25, 12, 18, 77};
    CHECK(generate_experiment(config) == generate_experiment(config));

    ExperimentConfig other = config;
    other.seed = 78;
    CHECK(!(generate_experiment(config) == generate_experiment(other)));
}

TEST_CASE("invalid experiment configs are rejected") {
    CHECK_THROWS_AS(generate_experiment({10, 10, 11, 5, 0}), nomad::ConfigError);
    CHECK_THROWS_AS(generate_experiment({0, 0, 0, 0, 0}), nomad::ConfigError);
    CHECK_THROWS_AS(generate_experiment({10, 10, -1, 5, 0}), nomad::ConfigError);
}

TEST_CASE("the toy manipulations reproduce the published counts and p-values") {
    const CanonicalTable base = generate_experiment({48, 52, 32, 40, 5});
    auto rows_where = [&](const char* condition, const char* vote, long limit) {
        std::vector<long> rows;
        for (long r = 0; r < base.data_row_count() && long(rows.size()) < limit; ++r) {
            if (base.data_cell(1, r) == condition && base.data_cell(2, r) == vote) {
                rows.push_back(r);
            }
        }
        return rows;
    };

    SUBCASE("response editing: four control yes -> no") {
        ManipulationSpec spec;
        spec.kind = ManipKind::edit_cells;
        spec.columns = {"intends_to_vote"};
        spec.rows = rows_where("control", "yes", 4);
        spec.values = {"no"};
        const CanonicalTable edited = apply_manipulation(base, spec, 0);
        CHECK(count_condition(edited, "control") == std::pair<long, long>(28, 48));
        const auto result = nomad::two_proportion_z(28, 48, 40, 52);
        CHECK(std::fabs(result.p - 0.047) <= 0.005);
    }

    SUBCASE("row deletion: three control yes, four treatment no") {
        ManipulationSpec spec;
        spec.kind = ManipKind::delete_rows;
        auto doomed = rows_where("control", "yes", 3);
        const auto more = rows_where("treatment", "no", 4);
        doomed.insert(doomed.end(), more.begin(), more.end());
        spec.rows = doomed;
        const CanonicalTable reduced = apply_manipulation(base, spec, 0);
        CHECK(reduced.data_row_count() == 93);
        CHECK(count_condition(reduced, "control") == std::pair<long, long>(29, 45));
        CHECK(count_condition(reduced, "treatment") == std::pair<long, long>(40, 48));
        const auto result = nomad::two_proportion_z(29, 45, 40, 48);
        CHECK(std::fabs(result.p - 0.038) <= 0.005);
    }

    SUBCASE("column deletion removes the named column") {
        ManipulationSpec spec;
        spec.kind = ManipKind::delete_column;
        spec.columns = {"condition"};
        const CanonicalTable dropped = apply_manipulation(base, spec, 0);
        CHECK(dropped.find_column("condition") == -1);
        CHECK(dropped.columns.size() == base.columns.size() - 1);
    }
}

TEST_CASE("added rows carry the Imported status marker when the profile has one") {
    const CanonicalTable table = paper_example::table();
    ManipulationSpec spec;
    spec.kind = ManipKind::add_rows;
    spec.count = 3;
    const CanonicalTable padded = apply_manipulation(table, spec, 4);
    CHECK(padded.data_row_count() == 7);
    const long status = padded.find_column("Status");
    for (long r = 4; r < 7; ++r) {
        CHECK(padded.data_cell(std::size_t(status), r) == "Imported");
    }
    // Other columns get synthetic content, not copies.
    CHECK(padded.data_cell(std::size_t(padded.find_column("name")), 4) != "Robert");
}

TEST_CASE("added columns are dichotomous with blank header metadata") {
    const CanonicalTable table = paper_example::table();
    ManipulationSpec spec;
    spec.kind = ManipKind::add_column;
    spec.new_column_name = "blue_eyes";
    const CanonicalTable widened = apply_manipulation(table, spec, 12);
    const long col = widened.find_column("blue_eyes");
    REQUIRE(col >= 0);
    CHECK(widened.columns[std::size_t(col)].cells.size() ==
          widened.columns[0].cells.size());
    for (long m = 0; m < widened.metadata_row_count(); ++m) {
        CHECK(widened.columns[std::size_t(col)].cells[std::size_t(m)] == "");
    }
    for (long r = 0; r < widened.data_row_count(); ++r) {
        const std::string& cell = widened.data_cell(std::size_t(col), r);
        CHECK((cell == "0" || cell == "1"));
    }
    CHECK_THROWS_AS(apply_manipulation(widened, spec, 12), nomad::ConfigError);
}

TEST_CASE("manipulations never mutate their input") {
    const CanonicalTable table = generate_experiment({5, 5, 3, 2, 11});
    const CanonicalTable copy = table;
    ManipulationSpec spec;
    spec.kind = ManipKind::delete_rows;
    spec.rows = {0, 1};
    (void)apply_manipulation(table, spec, 0);
    CHECK(table == copy);
}

TEST_CASE("bad targets are config errors") {
    const CanonicalTable table = generate_experiment({5, 5, 3, 2, 11});
    ManipulationSpec edit;
    edit.kind = ManipKind::edit_cells;
    edit.columns = {"nope"};
    edit.rows = {0};
    CHECK_THROWS_AS(apply_manipulation(table, edit, 0), nomad::ConfigError);

    edit.columns = {"condition"};
    edit.rows = {10};
    CHECK_THROWS_AS(apply_manipulation(table, edit, 0), nomad::ConfigError);

    ManipulationSpec del;
    del.kind = ManipKind::delete_column;
    del.columns = {"ghost"};
    CHECK_THROWS_AS(apply_manipulation(table, del, 0), nomad::ConfigError);
}

TEST_CASE("every deceptive manipulation perturbs hashes or the column set") {
    nomad::SeededRng rng(41);
    for (int round = 0; round < 100; ++round) {
        helpers::TableGenOptions options;
        options.min_cols = 2;
        options.min_data_rows = 2;
        const CanonicalTable table = helpers::random_table(rng, options);
        const auto before = nomad::hash_columns(table);
        const auto names_before = table.column_names();

        ManipulationSpec spec;
        spec.kind = ManipKind(rng.below(5));
        switch (spec.kind) {
        case ManipKind::edit_cells:
            spec.columns = {names_before[std::size_t(rng.below(names_before.size()))]};
            spec.rows = {rng.range(0, table.data_row_count() - 1)};
            spec.values = {rng.token("edit_")};
            break;
        case ManipKind::delete_rows:
            spec.rows = {rng.range(0, table.data_row_count() - 1)};
            break;
        case ManipKind::add_rows:
            spec.count = rng.range(1, 3);
            break;
        case ManipKind::delete_column:
            spec.columns = {names_before[std::size_t(rng.below(names_before.size()))]};
            break;
        default:
            spec.new_column_name = rng.token("new_");
            break;
        }

        const CanonicalTable tampered = apply_manipulation(table, spec, rng.next());
        const auto after = nomad::hash_columns(tampered);
        const bool names_changed = tampered.column_names() != names_before;
        const bool hashes_changed = after != before;
        CHECK((names_changed || hashes_changed));
    }
}

TEST_CASE("scenario suite detects everything and clears the controls") {
    const nomad::ScenarioSummary summary = nomad::run_scenario_suite(250, 4242);
    CHECK(summary.n_scenarios == 250);
    CHECK(summary.deceptive_detection_rate() == 1.0);
    CHECK(summary.false_positive_rate() == 0.0);
    CHECK(summary.all_signatures_ok());
    CHECK(summary.legitimate_green == summary.legitimate_scenarios);
    // All five kinds drawn at this size.
    CHECK(summary.deceptive.size() == 5);

    const nomad::ScenarioSummary rerun = nomad::run_scenario_suite(250, 4242);
    CHECK(nomad::summary_to_json(rerun) == nomad::summary_to_json(summary));

    const nomad::ScenarioSummary single = nomad::run_scenario_suite(1, 1);
    CHECK(single.n_scenarios == 1);
    CHECK_THROWS_AS(nomad::run_scenario_suite(0, 1), nomad::ConfigError);
}

TEST_CASE("manipulation kind names are stable") {
    CHECK(nomad::to_string(ManipKind::edit_cells) == "edit_cells");
    CHECK(nomad::to_string(ManipKind::legitimate_extraneous_deletion) ==
          "legitimate_extraneous_deletion");
}
