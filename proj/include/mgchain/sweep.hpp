#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <iosfwd>
#include <string>
#include <thread>
#include <vector>

namespace mgchain {

// One output record of a sweep CSV.  Cells are indexed in grid order; failed
// cells produce rows with an error status instead of values, never partial
// data.
struct CsvRow {
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<CsvRow> rows;
};

// Deterministic compact formatting for all numeric output (%.12g).
std::string format_double(double v);

// '#'-prefixed header block: config echo, version, timestamp.  The
// timestamp line is the only non-deterministic output.
void write_header_lines(std::ostream& os, const std::string& echo_json);

// Header block followed by the column header and CSV rows (fields containing
// separators are quoted).  Throws ConfigError if the file cannot be written.
void write_csv(const std::string& path, const std::string& echo_json,
               const CsvTable& table);

// Runs tasks on a worker pool (n_threads <= 1 means inline) and gathers the
// results in task-index order, so the outcome is independent of scheduling.
// Tasks must not touch shared state.
template <class T>
std::vector<T> run_tasks(const std::vector<std::function<T()>>& tasks, int n_threads) {
    std::vector<T> results(tasks.size());
    if (n_threads <= 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
        return results;
    }
    const auto n_workers = std::min<std::size_t>(n_threads, tasks.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
                    results[i] = tasks[i]();
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// Cell tasks producing CSV rows, flattened in cell order.
std::vector<CsvRow> run_cells(const std::vector<std::function<std::vector<CsvRow>()>>& tasks,
                              int n_threads);

} // namespace mgchain
