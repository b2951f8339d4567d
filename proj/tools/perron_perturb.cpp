#include "perron/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace perron;
    CLI::App app{"Eigenvalues of rank-one perturbations A + t v w^T of singular M-matrices"};
    app.require_subcommand(1);

    std::string input;
    bool as_json = false;
    auto* analyze = app.add_subcommand("analyze", "spectral radius, NZP, p_vw, Routh-Hurwitz, asymptotics, verdict");
    analyze->add_option("input", input, "problem file (JSON)")->required();
    analyze->add_flag("--json", as_json, "machine-readable output");

    TraceOptions trace_opts;
    std::string svg;
    auto* trace = app.add_subcommand("trace", "eigenvalue curves of B(t) on a log grid");
    trace->add_option("input", input, "problem file (JSON)")->required();
    trace->add_option("--t-min", trace_opts.t_min, "smallest t")->capture_default_str();
    trace->add_option("--t-max", trace_opts.t_max, "largest t")->capture_default_str();
    trace->add_option("--points", trace_opts.points, "grid points")->capture_default_str();
    trace->add_option("--out", trace_opts.out_csv, "CSV output")->required();
    trace->add_option("--svg", svg, "optional SVG plot");

    SearchConfig cfg;
    std::string jsonl;
    auto* search = app.add_subcommand("search", "random search for eventually unstable problems");
    search->add_option("--n", cfg.n, "dimension")->capture_default_str();
    search->add_option("--samples", cfg.samples, "number of random problems")->capture_default_str();
    search->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    search->add_option("--out", jsonl, "JSON-lines output")->required();
    search->add_flag("--inject-paper", cfg.inject_paper, "also evaluate the built-in unstable instance for this n");
    search->add_option("--entry-scale", cfg.entry_scale, "upper bound of random entries")->capture_default_str();
    search->add_option("--cycle-scale", cfg.cycle_scale, "upper bound of forced cycle entries")
        ->capture_default_str();
    search->add_option("--sparsity", cfg.sparsity, "probability of a zero entry")->capture_default_str();
    search->add_flag("--force-cycle", cfg.force_cycle, "force a positive cyclic superdiagonal");
    search->add_flag("--positive-wv", cfg.require_positive_wv, "only sample w^T v > 0");
    search->add_flag("--allow-reducible", cfg.allow_reducible, "keep reducible H with simple rho(H)");
    search->add_option("--threads", cfg.threads, "worker threads (0: all cores)");

    std::string selector;
    int family_n = 0;
    std::string example_out;
    auto* example = app.add_subcommand("paper-example", "write a built-in example as a problem file");
    example->add_option("which", selector, "cx4 | ex33 | ex34 | ex34b | family(n)")->required();
    example->add_option("--n", family_n, "dimension for 'family'");
    example->add_option("--out", example_out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::invalid_input;
    }

    if (analyze->parsed()) {
        return run_command([&] { cmd_analyze(input, as_json, std::cout); }, std::cerr);
    }
    if (trace->parsed()) {
        if (!svg.empty()) {
            trace_opts.out_svg = svg;
        }
        return run_command([&] { cmd_trace(input, trace_opts, std::cerr); }, std::cerr);
    }
    if (search->parsed()) {
        return run_command([&] { cmd_search(cfg, jsonl, std::cout); }, std::cerr);
    }
    if (selector == "family" && family_n > 0) {
        selector = "family(" + std::to_string(family_n) + ")";
    }
    return run_command([&] { cmd_paper_example(selector, example_out, std::cout); }, std::cerr);
}
