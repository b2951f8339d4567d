#ifndef PERRON_IO_HPP
#define PERRON_IO_HPP

#include "perron/search.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace perron {

// {"H": [[...]], "v": [...], "w": [...], "label": "..."}; label optional.
struct ProblemFile {
    Matrix<double> h;
    Vector<double> v;
    Vector<double> w;
    std::string label;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
nlohmann::json to_json(const ProblemFile& file);
ProblemFile to_problem_file(const Problem& prob);
Problem make_problem(const ProblemFile& file);

// Selectors: cx4, ex33, ex34, ex34b, family(n) / family:n. family uses v = w = ones.
ProblemFile paper_example(const std::string& selector);

nlohmann::json to_json(const RealPolynomial<double>& p);
nlohmann::json to_json(const RootSet<double>& r);
nlohmann::json to_json(const StabilityVerdict<double>& v);
nlohmann::json to_json(const AsymptoticReport<double>& a);
nlohmann::json to_json(const CounterexampleRecord& rec);

// Everything cmd_analyze reports, as one JSON document.
nlohmann::json analyze(const Problem& prob);
void print_analysis(std::ostream& out, const nlohmann::json& report);

// Header t,re_1,im_1,...,re_n,im_n; %.17g numbers; one row per grid point.
void write_curves_csv(std::ostream& out, const EigenCurveSet<double>& curves);
void write_curves_svg(std::ostream& out, const EigenCurveSet<double>& curves, const std::string& title);

std::string format_number(double x);

}  // namespace perron

#endif  // PERRON_IO_HPP
