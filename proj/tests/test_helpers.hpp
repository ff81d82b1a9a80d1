#ifndef NOMAD_TESTS_TEST_HELPERS_HPP
#define NOMAD_TESTS_TEST_HELPERS_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nomad/csv.hpp"
#include "nomad/seeded_rng.hpp"

namespace helpers {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("nomad-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), long(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

// Cell palette exercising commas, quotes, bare CR, LF, Unicode, and
// emptiness. Atomic entries only — cells never contain a CRLF pair, which
// parse_csv would (by contract) normalize to LF.
inline std::string random_cell(nomad::SeededRng& rng) {
    switch (rng.below(12)) {
    case 0: return "";
    case 1: return "plain";
    case 2: return "a,b";
    case 3: return "say \"hi\"";
    case 4: return "line1\nline2";
    case 5: return "carriage\rreturn";
    case 6: return "na\xc3\xafve";              // naïve
    case 7: return "\xe6\x97\xa5\xe6\x9c\xac";  // 日本
    case 8: return "0";
    case 9: return "-12.75";
    case 10: return rng.token("t_");
    default: return "trailing space ";
    }
}

struct TableGenOptions {
    int min_cols = 1;
    int max_cols = 8;
    int min_data_rows = 0;
    int max_data_rows = 25;
    int header_rows = 0;  // 0 = random in [1, 3]
};

inline nomad::CanonicalTable random_table(nomad::SeededRng& rng,
                                          const TableGenOptions& options = {}) {
    nomad::CanonicalTable table;
    const int header_rows =
        options.header_rows > 0 ? options.header_rows : int(rng.range(1, 3));
    table.profile = nomad::PlatformProfile{"local", header_rows, std::nullopt, std::nullopt};

    const long cols = rng.range(options.min_cols, options.max_cols);
    const long data_rows = rng.range(options.min_data_rows, options.max_data_rows);
    const long cell_rows = (header_rows - 1) + data_rows;
    for (long c = 0; c < cols; ++c) {
        nomad::Column column;
        column.name = "c" + std::to_string(c) + "_" + rng.token("");
        for (long r = 0; r < cell_rows; ++r) {
            column.cells.push_back(random_cell(rng));
        }
        table.columns.push_back(std::move(column));
    }
    return table;
}

} // namespace helpers

#endif
