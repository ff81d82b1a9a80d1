#ifndef NOMAD_TESTS_PAPER_EXAMPLE_HPP
#define NOMAD_TESTS_PAPER_EXAMPLE_HPP

// The worked toy survey: four respondents asked for first name, favorite
// color, age, and coffee-or-tea, exported with the platform's metadata and
// reserved columns. Used by the verify tests and the acceptance suite.

#include <string>
#include <vector>

#include "nomad/csv.hpp"
#include "nomad/profiles.hpp"

namespace paper_example {

inline constexpr const char* kSurveyId = "SV_0q9y0TA1fUsvrkG";

// The eight columns a tidy-but-overzealous researcher deletes before
// archiving; only "name" (and the IP column) actually identify subjects.
inline const std::vector<std::string> kDeletedColumns = {
    "IPaddress", "hookParams", "name",        "RecipientID",
    "hookType",  "PanelID",    "EmbeddedData", "PanelMemberID",
};

inline std::string csv_text() {
    return
        // names
        "StartDate,EndDate,Status,IPaddress,name,color,age,drink,"
        "hookType,hookParams,RecipientID,PanelID,EmbeddedData,PanelMemberID\r\n"
        // question text
        "Start Date,End Date,Response Type,IP Address,What is your first name?,"
        "What is your favorite color?,How old are you?,Do you prefer coffee or tea?,"
        ",,,,,\r\n"
        // import ids
        "\"{\"\"ImportId\"\":\"\"startDate\"\"}\",\"{\"\"ImportId\"\":\"\"endDate\"\"}\","
        "\"{\"\"ImportId\"\":\"\"status\"\"}\",\"{\"\"ImportId\"\":\"\"ipAddress\"\"}\","
        "\"{\"\"ImportId\"\":\"\"QID1_TEXT\"\"}\",\"{\"\"ImportId\"\":\"\"QID2_TEXT\"\"}\","
        "\"{\"\"ImportId\"\":\"\"QID3_TEXT\"\"}\",\"{\"\"ImportId\"\":\"\"QID4\"\"}\","
        ",,,,,\r\n"
        // data
        "2024-05-01 10:02,2024-05-01 10:09,IP Address,198.51.100.24,Robert,green,52,coffee,"
        ",,,,,\r\n"
        "2024-05-01 10:04,2024-05-01 10:12,IP Address,203.0.113.9,Jane,Topaz,27,tea,"
        ",,,,,\r\n"
        "2024-05-01 10:07,2024-05-01 10:15,IP Address,192.0.2.55,Herman,Chartreuse,36,tea,"
        ",,,,,\r\n"
        "2024-05-01 10:11,2024-05-01 10:18,IP Address,198.51.100.77,Frida,taupe,19,coffee,"
        ",,,,,\r\n";
}

inline nomad::PlatformProfile profile() {
    // Built-in qualtrics conventions; this export names its IP column
    // "IPaddress", so point the profile at that spelling.
    nomad::PlatformProfile p = nomad::builtin_profile("qualtrics");
    p.ip_column_name = "IPaddress";
    return p;
}

inline nomad::CanonicalTable table() {
    return nomad::parse_csv(csv_text(), profile());
}

} // namespace paper_example

#endif
