#include "mgchain/sweep.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>

#include "mgchain/errors.hpp"
#include "mgchain/version.hpp"

namespace mgchain {

namespace {

// RFC 4180 quoting; only applied when a field needs it.
std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_header_lines(std::ostream& os, const std::string& echo_json) {
    os << "# config " << echo_json << "\n";
    os << "# version " << kVersion << "\n";
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[40];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
    os << "# generated " << stamp << "\n";
}

void write_csv(const std::string& path, const std::string& echo_json,
               const CsvTable& table) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    write_header_lines(f, echo_json);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        f << (i ? "," : "") << csv_escape(table.columns[i]);
    f << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.fields.size(); ++i)
            f << (i ? "," : "") << csv_escape(row.fields[i]);
        f << "\n";
    }
    f.flush();
    if (!f) throw ConfigError("write failed: " + path);
}

std::vector<CsvRow> run_cells(const std::vector<std::function<std::vector<CsvRow>()>>& tasks,
                              int n_threads) {
    auto groups = run_tasks(tasks, n_threads);
    std::vector<CsvRow> out;
    for (auto& g : groups)
        out.insert(out.end(), std::make_move_iterator(g.begin()),
                   std::make_move_iterator(g.end()));
    return out;
}

} // namespace mgchain
