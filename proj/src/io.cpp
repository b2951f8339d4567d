#include "perron/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>

namespace perron {

using nlohmann::json;

std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::vector<double> number_array(const json& j, const std::string& what)
{
    if (!j.is_array()) {
        throw ParseError(what + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) {
            throw ParseError(what + " must contain only numbers");
        }
        const double d = x.get<double>();
        if (!std::isfinite(d)) {
            throw ParseError(what + " contains a non-finite value");
        }
        out.push_back(d);
    }
    return out;
}

Vector<double> to_vector(const std::vector<double>& x)
{
    return Eigen::Map<const Vector<double>>(x.data(), static_cast<Eigen::Index>(x.size()));
}

json vector_json(const Vector<double>& x)
{
    return std::vector<double>(x.data(), x.data() + x.size());
}

json complex_json(const Complex<double>& z)
{
    return json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

ProblemFile parse_problem(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("problem file must be a JSON object");
    }
    for (const char* key : {"H", "v", "w"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("problem file is missing \"") + key + "\"");
        }
    }
    const json& hj = doc["H"];
    if (!hj.is_array() || hj.empty()) {
        throw ParseError("H must be a nonempty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(hj.size());
    ProblemFile out;
    out.h.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<double> row = number_array(hj[i], "H row " + std::to_string(i + 1));
        if (static_cast<Eigen::Index>(row.size()) != n) {
            throw DimensionMismatch("H row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                    " entries, expected " + std::to_string(n));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            out.h(i, j) = row[j];
        }
    }
    out.v = to_vector(number_array(doc["v"], "v"));
    out.w = to_vector(number_array(doc["w"], "w"));
    if (out.v.size() != n || out.w.size() != n) {
        throw DimensionMismatch("v and w must have length " + std::to_string(n));
    }
    if (doc.contains("label")) {
        if (!doc["label"].is_string()) {
            throw ParseError("label must be a string");
        }
        out.label = doc["label"].get<std::string>();
    }
    return out;
}

ProblemFile load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

json to_json(const ProblemFile& file)
{
    json h = json::array();
    for (Eigen::Index i = 0; i < file.h.rows(); ++i) {
        h.push_back(vector_json(file.h.row(i).transpose()));
    }
    json out{{"H", h}, {"v", vector_json(file.v)}, {"w", vector_json(file.w)}};
    if (!file.label.empty()) {
        out["label"] = file.label;
    }
    return out;
}

ProblemFile to_problem_file(const Problem& prob)
{
    return {prob.h.matrix(), prob.v, prob.w, prob.label};
}

Problem make_problem(const ProblemFile& file)
{
    return make_problem(NonnegativeMatrix<double>(file.h), file.v, file.w, file.label);
}

ProblemFile paper_example(const std::string& selector)
{
    if (selector == "cx4") {
        return to_problem_file(paper_counterexample_4());
    }
    if (selector == "ex33") {
        return to_problem_file(paper_example_33());
    }
    if (selector == "ex34") {
        return to_problem_file(paper_example_34());
    }
    if (selector == "ex34b") {
        return to_problem_file(paper_example_34b());
    }
    static const std::regex family(R"(family[(:](\d+)\)?)");
    std::smatch m;
    if (std::regex_match(selector, m, family)) {
        const int n = std::stoi(m[1]);
        if (n < 4) {
            throw UnknownSelector("family(n) needs n >= 4");
        }
        ProblemFile out;
        out.h = paper_family(n).matrix();
        out.v = Vector<double>::Ones(n);
        out.w = Vector<double>::Ones(n);
        out.label = "family(" + std::to_string(n) + ")";
        return out;
    }
    throw UnknownSelector("unknown example selector '" + selector + "' (cx4, ex33, ex34, ex34b, family(n))");
}

json to_json(const RealPolynomial<double>& p)
{
    const RealPolynomial<double> t = p.trimmed();
    return json{{"coeffs", t.coeffs()}, {"degree", p.degree()}};
}

json to_json(const RootSet<double>& r)
{
    json roots = json::array();
    for (const auto& x : r.roots) {
        json j = complex_json(x.value);
        j["multiplicity"] = x.multiplicity;
        roots.push_back(j);
    }
    return roots;
}

json to_json(const StabilityVerdict<double>& v)
{
    json out{{"status", to_string(v.status)}, {"witness_roots", to_json(v.witness_roots)}, {"reason", v.reason}};
    out["t1_estimate"] = v.t1_estimate ? json(*v.t1_estimate) : json(nullptr);
    if (v.branch_real_part) {
        out["branch_real_part"] = *v.branch_real_part;
    }
    return out;
}

json to_json(const AsymptoticReport<double>& a)
{
    json branches = json::array();
    for (const auto& b : a.branches) {
        json j{{"leading", complex_json(b.leading)}, {"exponent", b.exponent}};
        j["constant"] = b.constant ? complex_json(*b.constant) : json(nullptr);
        branches.push_back(j);
    }
    return json{{"case", to_string(a.kind)},
                {"divergent_count", a.divergent_count},
                {"branches", branches},
                {"finite_limits", to_json(a.finite_limits)}};
}

json to_json(const CounterexampleRecord& rec)
{
    json out = to_json(to_problem_file(rec.prob));
    out["n"] = rec.prob.size();
    out["seed"] = rec.seed;
    out["index"] = rec.index ? json(*rec.index) : json(nullptr);
    out["source"] = rec.source;
    out["rho"] = rec.prob.rho;
    out["wv"] = rec.prob.wv;
    out["pvw"] = to_json(rec.pvw);
    out["verdict"] = to_json(rec.verdict);
    out["check"] = json{{"t", rec.check_t}, {"min_re", rec.check_min_re}};
    return out;
}

json analyze(const Problem& prob)
{
    const std::vector<double> mom = krylov_moments(prob, 3);
    const RealPolynomial<double> pvw = p_vw_lemma16(prob).trimmed();
    const HurwitzVerdict hv = routh_hurwitz(pvw);
    json out;
    out["label"] = prob.label;
    out["n"] = prob.size();
    out["rho"] = prob.rho;
    out["rho_simple"] = true;
    out["irreducible"] = prob.irreducible;
    out["nzp"] = json{{"lv", prob.nzp.lv}, {"wr", prob.nzp.wr}, {"holds", prob.nzp.holds}};
    out["wv"] = mom[0];
    out["wAv"] = mom[1];
    out["wA2v"] = mom[2];
    out["pvw"] = to_json(pvw);
    out["pvw_roots"] = pvw.degree() >= 1 ? to_json(roots(pvw)) : json::array();
    out["hurwitz"] = json{{"status", to_string(hv.status)},
                          {"first_failure", hv.first_failure ? json(*hv.first_failure) : json(nullptr)}};
    out["verdict"] = to_json(classify(prob));
    out["asymptotics"] = to_json(asymptotics(prob));
    return out;
}

namespace {

std::string complex_text(const json& z)
{
    const double re = z["re"].get<double>();
    const double im = z["im"].get<double>();
    char buf[96];
    if (im == 0.0) {
        std::snprintf(buf, sizeof buf, "%.6g", re);
    } else {
        std::snprintf(buf, sizeof buf, "%.6g %c %.6gi", re, im < 0 ? '-' : '+', std::abs(im));
    }
    return buf;
}

std::string roots_text(const json& roots)
{
    if (roots.empty()) {
        return "(none)";
    }
    std::string s;
    for (const auto& r : roots) {
        if (!s.empty()) {
            s += ", ";
        }
        s += complex_text(r);
        if (r["multiplicity"].get<int>() > 1) {
            s += " (x" + std::to_string(r["multiplicity"].get<int>()) + ")";
        }
    }
    return s;
}

}  // namespace

void print_analysis(std::ostream& out, const json& r)
{
    if (!r["label"].get<std::string>().empty()) {
        out << "problem        " << r["label"].get<std::string>() << "\n";
    }
    out << "n              " << r["n"] << "\n";
    out << "rho(H)         " << format_number(r["rho"].get<double>()) << " (simple)\n";
    out << "irreducible    " << (r["irreducible"].get<bool>() ? "yes" : "no") << "\n";
    out << "NZP            " << (r["nzp"]["holds"].get<bool>() ? "holds" : "fails")
        << "  z_l.v = " << format_number(r["nzp"]["lv"].get<double>())
        << "  w.z_r = " << format_number(r["nzp"]["wr"].get<double>()) << "\n";
    out << "w.v            " << format_number(r["wv"].get<double>()) << "\n";
    out << "w.A v          " << format_number(r["wAv"].get<double>()) << "\n";
    out << "w.A^2 v        " << format_number(r["wA2v"].get<double>()) << "\n";
    out << "p_vw (asc)     ";
    for (const auto& c : r["pvw"]["coeffs"]) {
        out << format_number(c.get<double>()) << " ";
    }
    out << "(degree " << r["pvw"]["degree"] << ")\n";
    out << "p_vw roots     " << roots_text(r["pvw_roots"]) << "\n";
    out << "Routh-Hurwitz  " << r["hurwitz"]["status"].get<std::string>() << "\n";
    const json& a = r["asymptotics"];
    out << "asymptotics    " << a["case"].get<std::string>() << ", " << a["divergent_count"]
        << " divergent branch(es)\n";
    for (const auto& b : a["branches"]) {
        out << "  branch       (" << complex_text(b["leading"]) << ") * t^" << b["exponent"].get<double>();
        if (!b["constant"].is_null()) {
            out << " + " << complex_text(b["constant"]);
        } else {
            out << " + O(1)";
        }
        out << "\n";
    }
    out << "  finite       " << roots_text(a["finite_limits"]) << "\n";
    const json& v = r["verdict"];
    out << "verdict        " << v["status"].get<std::string>() << "\n";
    out << "  reason       " << v["reason"].get<std::string>() << "\n";
    if (!v["t1_estimate"].is_null()) {
        out << "  t1 estimate  " << format_number(v["t1_estimate"].get<double>()) << "\n";
    }
}

void write_curves_csv(std::ostream& out, const EigenCurveSet<double>& curves)
{
    out << "t";
    for (std::size_t i = 1; i <= curves.paths.size(); ++i) {
        out << ",re_" << i << ",im_" << i;
    }
    out << "\n";
    for (std::size_t j = 0; j < curves.t_grid.size(); ++j) {
        out << format_number(curves.t_grid[j]);
        for (const auto& path : curves.paths) {
            out << "," << format_number(path[j].real()) << "," << format_number(path[j].imag());
        }
        out << "\n";
    }
}

namespace {

std::string star_points(double cx, double cy, int spikes, double outer, double inner)
{
    std::ostringstream s;
    for (int k = 0; k < 2 * spikes; ++k) {
        const double r = k % 2 == 0 ? outer : inner;
        const double a = std::numbers::pi * k / spikes - std::numbers::pi / 2;
        s << (k ? " " : "") << cx + r * std::cos(a) << "," << cy + r * std::sin(a);
    }
    return s.str();
}

}  // namespace

void write_curves_svg(std::ostream& out, const EigenCurveSet<double>& curves, const std::string& title)
{
    constexpr double width = 800;
    constexpr double height = 600;
    constexpr double margin = 50;

    // Autoscale on the anchors and on path points within a window around them,
    // so branches escaping to infinity do not flatten the picture.
    double anchor = 1.0;
    for (const auto* set : {&curves.a_eigs, &curves.pvw_roots}) {
        for (const auto& r : set->roots) {
            anchor = std::max(anchor, std::abs(r.value));
        }
    }
    const double window = 3.0 * anchor;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    auto include = [&](const Complex<double>& z) {
        if (std::abs(z) > window) {
            return;
        }
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    };
    for (const auto* set : {&curves.a_eigs, &curves.pvw_roots}) {
        for (const auto& r : set->roots) {
            include(r.value);
        }
    }
    for (const auto& path : curves.paths) {
        for (const auto& z : path) {
            include(z);
        }
    }
    const double padx = 0.05 * std::max(xmax - xmin, 1e-6);
    const double pady = 0.05 * std::max(ymax - ymin, 1e-6);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
    out << "<defs><clipPath id=\"plot\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << width - 2 * margin << "\" height=\"" << height - 2 * margin << "\"/></clipPath></defs>\n";
    out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
        << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << title
        << "</text>\n";
    out << "<text x=\"" << margin << "\" y=\"" << height - 15 << "\" font-family=\"sans-serif\" font-size=\"11\">Re ["
        << xmin << ", " << xmax << "]  Im [" << ymin << ", " << ymax << "]</text>\n";
    out << "<g clip-path=\"url(#plot)\">\n";
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(0)
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(0) << "\" y2=\"" << py(ymax)
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    static const char* colors[] = {"#d62728", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22"};
    for (std::size_t i = 0; i < curves.paths.size(); ++i) {
        out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[i % 8] << "\" points=\"";
        for (std::size_t j = 0; j < curves.paths[i].size(); ++j) {
            const auto z = curves.paths[i][j];
            out << (j ? " " : "") << px(z.real()) << "," << py(z.imag());
        }
        out << "\"/>\n";
    }
    for (const auto& r : curves.a_eigs.roots) {
        out << "<polygon class=\"a-eig\" fill=\"green\" points=\""
            << star_points(px(r.value.real()), py(r.value.imag()), 5, 9, 4) << "\"/>\n";
    }
    for (const auto& r : curves.pvw_roots.roots) {
        out << "<polygon class=\"pvw-root\" fill=\"blue\" points=\""
            << star_points(px(r.value.real()), py(r.value.imag()), 4, 9, 3) << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
}

}  // namespace perron
