#ifndef PERRON_COMMANDS_HPP
#define PERRON_COMMANDS_HPP

#include "perron/search.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace perron {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int invalid_input = 2;
inline constexpr int numerical = 3;
}  // namespace exit_code

// Runs body, reporting exceptions on err and mapping them to exit codes.
int run_command(const std::function<void()>& body, std::ostream& err);

void cmd_analyze(const std::string& input, bool as_json, std::ostream& out);

struct TraceOptions {
    double t_min = 1e-3;
    double t_max = 1e3;
    int points = 200;
    std::string out_csv;
    std::optional<std::string> out_svg;
};

void cmd_trace(const std::string& input, const TraceOptions& opts, std::ostream& log);

// Writes one JSON record per line to out_jsonl and a summary line to summary.
void cmd_search(const SearchConfig& config, const std::string& out_jsonl, std::ostream& summary);

// Writes the selected instance as a problem file; to out when path is empty.
void cmd_paper_example(const std::string& selector, const std::string& path, std::ostream& out);

}  // namespace perron

#endif  // PERRON_COMMANDS_HPP
