#include "perron/commands.hpp"

#include "perron/io.hpp"

#include <fstream>
#include <ostream>

namespace perron {

int run_command(const std::function<void()>& body, std::ostream& err)
{
    try {
        body();
        return exit_code::ok;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid_input;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_code::numerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid_input;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io;
    }
}

void cmd_analyze(const std::string& input, bool as_json, std::ostream& out)
{
    const Problem prob = make_problem(load_problem(input));
    const nlohmann::json report = analyze(prob);
    if (as_json) {
        out << report.dump(2) << "\n";
    } else {
        print_analysis(out, report);
    }
}

namespace {

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    return f;
}

}  // namespace

void cmd_trace(const std::string& input, const TraceOptions& opts, std::ostream& log)
{
    if (opts.t_min <= 0.0 || opts.t_max < opts.t_min) {
        throw InputError("trace needs 0 < t-min <= t-max");
    }
    if (opts.points < 1 || (opts.points < 2 && opts.t_max > opts.t_min)) {
        throw InputError("trace needs at least 2 points for a nondegenerate range");
    }
    const Problem prob = make_problem(load_problem(input));
    const EigenCurveSet<double> curves = trace_eigenvalues(prob, opts.t_min, opts.t_max, opts.points);
    {
        std::ofstream csv = open_output(opts.out_csv);
        write_curves_csv(csv, curves);
    }
    log << "wrote " << curves.t_grid.size() << " rows to " << opts.out_csv << "\n";
    if (opts.out_svg) {
        std::ofstream svg = open_output(*opts.out_svg);
        write_curves_svg(svg, curves, prob.label.empty() ? "eigenvalues of B(t)" : "eigenvalues of B(t): " + prob.label);
        log << "wrote " << *opts.out_svg << "\n";
    }
}

void cmd_search(const SearchConfig& config, const std::string& out_jsonl, std::ostream& summary)
{
    std::ofstream f = open_output(out_jsonl);
    SearchStats stats;
    const std::vector<CounterexampleRecord> records = falsify(config, &stats);
    for (const auto& rec : records) {
        f << to_json(rec).dump() << "\n";
    }
    for (const auto& line : stats.log) {
        summary << "# " << line << "\n";
    }
    summary << "n=" << config.n << " seed=" << config.seed << " samples=" << stats.sampled
            << " records=" << records.size() << " unstable_verdicts=" << stats.unstable
            << " dropped=" << stats.dropped << " indeterminate=" << stats.indeterminate
            << " generation_failures=" << stats.generation_failures << "\n";
}

void cmd_paper_example(const std::string& selector, const std::string& path, std::ostream& out)
{
    const std::string text = to_json(paper_example(selector)).dump(2) + "\n";
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f = open_output(path);
    f << text;
}

}  // namespace perron
