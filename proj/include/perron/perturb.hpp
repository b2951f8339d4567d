#ifndef PERRON_PERTURB_HPP
#define PERRON_PERTURB_HPP

#include "perron/matcore.hpp"
#include "perron/polynomial.hpp"
#include "perron/types.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace perron {

// H, v, w together with everything derived from them that the analysis needs.
template <typename Scalar>
struct PerturbationProblem {
    NonnegativeMatrix<Scalar> h;
    SingularMMatrix<Scalar> a;
    Vector<Scalar> v;
    Vector<Scalar> w;
    Scalar rho = Scalar(0);
    bool irreducible = false;
    NzpReport<Scalar> nzp;
    Scalar wv = Scalar(0);
    std::string label;

    Eigen::Index size() const { return h.size(); }
};

namespace detail {

template <typename Scalar>
void check_perturbation_vector(const Vector<Scalar>& x, Eigen::Index n, const char* name)
{
    if (x.size() != n) {
        throw DimensionMismatch(std::string(name) + " must have length " + std::to_string(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(static_cast<double>(x(i))) || x(i) < Scalar(0)) {
            throw InputError(std::string(name) + " entry " + std::to_string(i + 1) + " is negative or not finite");
        }
    }
}

}  // namespace detail

// Throws NotSimple when rho(H) is not an algebraically simple eigenvalue.
template <typename Scalar>
PerturbationProblem<Scalar> make_problem(NonnegativeMatrix<Scalar> h, Vector<Scalar> v, Vector<Scalar> w,
                                         std::string label = {})
{
    const Eigen::Index n = h.size();
    detail::check_perturbation_vector(v, n, "v");
    detail::check_perturbation_vector(w, n, "w");
    const SpectralRadius<Scalar> sr = spectral_radius(h);
    const PerronPair<Scalar> pair = perron_pair(h, sr);
    const NzpReport<Scalar> nzp = check_nzp(pair, v, w);
    SingularMMatrix<Scalar> a = to_m_matrix(h, sr.rho);
    const bool irreducible = is_irreducible(h);
    const Scalar wv = w.dot(v);
    return PerturbationProblem<Scalar>{std::move(h), std::move(a), std::move(v), std::move(w), sr.rho,
                                       irreducible,  nzp,          wv,           std::move(label)};
}

template <typename Scalar>
PerturbationProblem<Scalar> make_problem(const Matrix<Scalar>& h, const Vector<Scalar>& v, const Vector<Scalar>& w,
                                         std::string label = {})
{
    return make_problem(NonnegativeMatrix<Scalar>(h), v, w, std::move(label));
}

// w^T A^j v for j = 0 .. count-1.
template <typename Scalar>
std::vector<Scalar> krylov_moments(const PerturbationProblem<Scalar>& prob, int count)
{
    std::vector<Scalar> out;
    Vector<Scalar> x = prob.v;
    for (int j = 0; j < count; ++j) {
        out.push_back(prob.w.dot(x));
        x = prob.a.entries * x;
    }
    return out;
}

template <typename Scalar>
Matrix<Scalar> b_of_t(const PerturbationProblem<Scalar>& prob, Scalar t)
{
    return prob.a.entries + t * prob.v * prob.w.transpose();
}

// p_vw(lambda) = sum_{i<l} (sum_{k-j=i+1} m_k w^T A^j v) lambda^i with m_A = sum m_k lambda^k of degree l.
template <typename Scalar>
RealPolynomial<Scalar> p_vw_lemma16(const PerturbationProblem<Scalar>& prob)
{
    const RealPolynomial<Scalar> m = minimal_poly(prob.a.entries);
    const int l = m.degree();
    const std::vector<Scalar> moments = krylov_moments(prob, l);
    std::vector<Scalar> c(l, Scalar(0));
    for (int i = 0; i < l; ++i) {
        for (int k = i + 1; k <= l; ++k) {
            c[i] += m[k] * moments[k - i - 1];
        }
    }
    return RealPolynomial<Scalar>(std::move(c));
}

// det(lambda I - A) - det(lambda I - (A + v w^T)); only equals p_vw when A is nonderogatory.
template <typename Scalar>
RealPolynomial<Scalar> p_vw_det_oracle(const PerturbationProblem<Scalar>& prob)
{
    const Eigen::Index n = prob.size();
    const RealPolynomial<Scalar> pa = char_poly(prob.a.entries);
    const RealPolynomial<Scalar> m = minimal_poly(prob.a.entries);
    if (m.degree() != n) {
        throw NotNonderogatory("p_vw_det_oracle: minimal polynomial has degree " + std::to_string(m.degree()) +
                               " < n = " + std::to_string(n));
    }
    for (Eigen::Index k = 0; k <= n; ++k) {
        if (std::abs(m[k] - pa[k]) > Scalar(1e-8) * std::max(Scalar(1), std::abs(pa[k]))) {
            throw NotNonderogatory("p_vw_det_oracle: minimal and characteristic polynomials differ");
        }
    }
    const RealPolynomial<Scalar> pb = char_poly(b_of_t(prob, Scalar(1)));
    std::vector<Scalar> c(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        c[k] = pa[k] - pb[k];
    }
    return RealPolynomial<Scalar>(std::move(c));
}

// 8 points on |lambda| = 1 + rho, rotated off the real axis by an irrational angle.
template <typename Scalar>
std::vector<Complex<Scalar>> default_sample_points(const PerturbationProblem<Scalar>& prob)
{
    const Scalar radius = Scalar(1) + prob.rho;
    const Scalar offset = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    std::vector<Complex<Scalar>> out;
    for (int k = 0; k < 8; ++k) {
        out.push_back(std::polar(radius, Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(8) + offset));
    }
    return out;
}

// max |LHS - RHS| / (1 + |LHS|) for det(lambda I - B(t)) = det(lambda I - A) / m_A(lambda) * (m_A(lambda) - t p_vw(lambda)).
template <typename Scalar>
Scalar factorization_residual(const PerturbationProblem<Scalar>& prob, Scalar t,
                              const std::vector<Complex<Scalar>>& sample_points)
{
    using C = Complex<Scalar>;
    const RealPolynomial<Scalar> pb = char_poly(b_of_t(prob, t));
    const RealPolynomial<Scalar> pa = char_poly(prob.a.entries);
    const RealPolynomial<Scalar> m = minimal_poly(prob.a.entries);
    const RealPolynomial<Scalar> pvw = p_vw_lemma16(prob);
    const std::vector<C> spectrum = eigenvalues(prob.a.entries).values();

    Scalar worst(0);
    for (const C& z : sample_points) {
        for (const C& e : spectrum) {
            if (std::abs(z - e) < Scalar(1e-6)) {
                throw InputError("factorization_residual: sample point too close to an eigenvalue of A");
            }
        }
        const C lhs = pb(z);
        const C mz = m(z);
        const C rhs = pa(z) / mz * (mz - t * pvw(z));
        worst = std::max(worst, std::abs(lhs - rhs) / (Scalar(1) + std::abs(lhs)));
    }
    return worst;
}

template <typename Scalar>
Scalar factorization_residual(const PerturbationProblem<Scalar>& prob, Scalar t)
{
    return factorization_residual(prob, t, default_sample_points(prob));
}

template <typename Scalar>
std::vector<Scalar> log_grid(Scalar t_min, Scalar t_max, int points)
{
    if (points < 1 || t_min <= Scalar(0) || t_max < t_min) {
        throw std::invalid_argument("log_grid: need 0 < t_min <= t_max and points >= 1");
    }
    if (points == 1 || t_min == t_max) {
        return {t_min};
    }
    std::vector<Scalar> out(points);
    const Scalar lo = std::log(t_min);
    const Scalar hi = std::log(t_max);
    for (int j = 0; j < points; ++j) {
        out[j] = std::exp(lo + (hi - lo) * Scalar(j) / Scalar(points - 1));
    }
    out.front() = t_min;
    out.back() = t_max;
    return out;
}

template <typename Scalar>
struct EigenCurveSet {
    std::vector<Scalar> t_grid;
    std::vector<std::vector<Complex<Scalar>>> paths;  // paths[i][j]: i-th path at t_grid[j]
    RootSet<Scalar> a_eigs;
    RootSet<Scalar> pvw_roots;
};

// Reorders next so that next[i] continues prev[i]: repeatedly take the globally
// closest unassigned (prev, next) pair, ties resolved by index order.
template <typename Scalar>
std::vector<Complex<Scalar>> match_greedy(const std::vector<Complex<Scalar>>& prev,
                                          const std::vector<Complex<Scalar>>& next)
{
    const std::size_t n = prev.size();
    std::vector<Complex<Scalar>> out(n);
    std::vector<bool> prev_used(n, false);
    std::vector<bool> next_used(n, false);
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t bi = n;
        std::size_t bj = n;
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (prev_used[i]) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (next_used[j]) {
                    continue;
                }
                const Scalar d = std::abs(prev[i] - next[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        prev_used[bi] = next_used[bj] = true;
        out[bi] = next[bj];
    }
    return out;
}

template <typename Scalar>
EigenCurveSet<Scalar> trace_eigenvalues(const PerturbationProblem<Scalar>& prob, Scalar t_min, Scalar t_max,
                                        int points)
{
    EigenCurveSet<Scalar> out;
    out.t_grid = log_grid(t_min, t_max, points);
    const std::size_t n = static_cast<std::size_t>(prob.size());
    out.paths.assign(n, std::vector<Complex<Scalar>>(out.t_grid.size()));

    std::vector<Complex<Scalar>> prev;
    for (std::size_t j = 0; j < out.t_grid.size(); ++j) {
        const Scalar t = out.t_grid[j];
        std::vector<Complex<Scalar>> col;
        try {
            col = eigenvalues(b_of_t(prob, t)).values();
        } catch (const ConvergenceFailure& e) {
            throw ConvergenceFailure(std::string(e.what()) + " at t = " + std::to_string(static_cast<double>(t)));
        }
        if (j > 0) {
            col = match_greedy(prev, col);
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.paths[i][j] = col[i];
        }
        prev = std::move(col);
    }
    out.a_eigs = eigenvalues(prob.a.entries);
    const RealPolynomial<Scalar> pvw = p_vw_lemma16(prob);
    if (pvw.degree() >= 1) {
        out.pvw_roots = roots(pvw);
    }
    return out;
}

// n = 2: the moving eigenvalues solve lambda^2 - lambda (mu + t w^T v) + t w^T adj(A) v = 0.
template <typename Scalar>
struct N2ClosedForm {
    Scalar mu = Scalar(0);
    RealPolynomial<Scalar> base;   // lambda^2 - mu lambda
    RealPolynomial<Scalar> slope;  // -w^T v lambda + w^T adj(A) v
    Scalar wv = Scalar(0);
    Scalar w_adj_v = Scalar(0);
    std::optional<Scalar> zeta;           // w^T adj(A) v / w^T v
    std::optional<Scalar> r;              // |w^T (zeta I - A)^-2 v|
    std::optional<Scalar> first_order;    // c in eig_2 = zeta + c / t + O(t^-2), c = -1 / (w^T (zeta I - A)^-2 v)
    std::optional<Scalar> asymptote_re;   // mu / 2 when w^T v = 0

    RealPolynomial<Scalar> quadratic(Scalar t) const { return base + t * slope; }
};

template <typename Scalar>
N2ClosedForm<Scalar> closed_form_n2(const PerturbationProblem<Scalar>& prob)
{
    if (prob.size() != 2) {
        throw DimensionMismatch("closed_form_n2 requires n = 2");
    }
    const Matrix<Scalar>& a = prob.a.entries;
    N2ClosedForm<Scalar> out;
    out.mu = a.trace();
    out.wv = prob.wv;
    out.w_adj_v = prob.w.dot(adjugate(a) * prob.v);
    out.base = RealPolynomial<Scalar>{Scalar(0), -out.mu, Scalar(1)};
    out.slope = RealPolynomial<Scalar>{out.w_adj_v, -out.wv};
    if (out.wv > Scalar(tol::nzp)) {
        const Scalar zeta = out.w_adj_v / out.wv;
        out.zeta = zeta;
        const Matrix<Scalar> shifted = zeta * Matrix<Scalar>::Identity(2, 2) - a;
        const Scalar det = shifted.determinant();
        if (std::abs(det) > Scalar(tol::nzp) * std::max(Scalar(1), shifted.squaredNorm())) {
            const Matrix<Scalar> inv = shifted.inverse();
            const Scalar g = prob.w.dot(inv * inv * prob.v);
            out.r = std::abs(g);
            if (g != Scalar(0)) {
                out.first_order = Scalar(-1) / g;
            }
        }
    } else {
        out.asymptote_re = out.mu / Scalar(2);
    }
    return out;
}

template <typename Scalar>
struct N3ClosedForm {
    RealPolynomial<Scalar> pvw_quadratic;  // lambda^2 wv + lambda (p2 wv + wAv) + (p1 wv + p2 wAv + wA^2v)
    Scalar re_sign_value = Scalar(0);      // -w^T (p2 I + A) v
    Scalar p1 = Scalar(0);
    Scalar p2 = Scalar(0);
};

template <typename Scalar>
N3ClosedForm<Scalar> closed_form_n3(const PerturbationProblem<Scalar>& prob)
{
    if (prob.size() != 3) {
        throw DimensionMismatch("closed_form_n3 requires n = 3");
    }
    const RealPolynomial<Scalar> pa = char_poly(prob.a.entries);
    const Scalar scale = std::max(Scalar(1), inf_norm(prob.a.entries));
    if (std::abs(pa[0]) > Scalar(1e-10) * scale * scale * scale) {
        throw NonsingularConstantTerm("closed_form_n3: det(A) is not zero");
    }
    const std::vector<Scalar> mom = krylov_moments(prob, 3);
    N3ClosedForm<Scalar> out;
    out.p1 = pa[1];
    out.p2 = pa[2];
    out.pvw_quadratic = RealPolynomial<Scalar>{out.p1 * mom[0] + out.p2 * mom[1] + mom[2],
                                               out.p2 * mom[0] + mom[1], mom[0]};
    out.re_sign_value = -(out.p2 * mom[0] + mom[1]);
    return out;
}

enum class AsymptoticCase { WvPositive, WvZeroWAvNonzero, WvZeroWAvZero };

inline const char* to_string(AsymptoticCase c)
{
    switch (c) {
    case AsymptoticCase::WvPositive:
        return "WvPositive";
    case AsymptoticCase::WvZeroWAvNonzero:
        return "WvZeroWAvNonzero";
    case AsymptoticCase::WvZeroWAvZero:
        return "WvZeroWAvZero";
    }
    return "?";
}

// One eigenvalue branch with |lambda| -> infinity: lambda ~ leading * t^exponent + constant.
template <typename Scalar>
struct DivergentBranch {
    Complex<Scalar> leading;
    Scalar exponent = Scalar(1);
    std::optional<Complex<Scalar>> constant;
};

template <typename Scalar>
struct AsymptoticReport {
    AsymptoticCase kind = AsymptoticCase::WvPositive;
    std::vector<DivergentBranch<Scalar>> branches;  // empty when only the count is known
    int divergent_count = 0;
    RootSet<Scalar> finite_limits;
    RealPolynomial<Scalar> pvw;
    Scalar wv = Scalar(0);
    Scalar wav = Scalar(0);
    Scalar wa2v = Scalar(0);
};

template <typename Scalar>
AsymptoticReport<Scalar> asymptotics(const PerturbationProblem<Scalar>& prob)
{
    using C = Complex<Scalar>;
    AsymptoticReport<Scalar> out;
    const std::vector<Scalar> mom = krylov_moments(prob, 3);
    out.wv = mom[0];
    out.wav = mom[1];
    out.wa2v = mom[2];
    const RealPolynomial<Scalar> raw = p_vw_lemma16(prob);
    const int l = static_cast<int>(raw.coeffs().size());  // degree of m_A
    out.pvw = raw.trimmed();
    const int d = out.pvw.degree();
    out.divergent_count = d < 0 ? 0 : l - d;
    if (d >= 1) {
        out.finite_limits = roots(out.pvw);
    }

    const Scalar wav_tol = Scalar(tol::nzp) * std::max(Scalar(1), inf_norm(prob.a.entries));
    if (out.wv > Scalar(tol::nzp)) {
        out.kind = AsymptoticCase::WvPositive;
        out.branches.push_back({C(out.wv), Scalar(1), std::nullopt});
    } else if (std::abs(out.wav) > wav_tol) {
        out.kind = AsymptoticCase::WvZeroWAvNonzero;
        // Principal branch pair: +-i sqrt(t |wAv|) when wAv < 0.
        const C root = std::sqrt(C(out.wav));
        const C constant(out.wa2v / (Scalar(2) * out.wav));
        out.branches.push_back({root, Scalar(0.5), constant});
        out.branches.push_back({-root, Scalar(0.5), constant});
    } else {
        out.kind = AsymptoticCase::WvZeroWAvZero;
    }
    return out;
}

enum class StabilityStatus { EventuallyStable, EventuallyUnstable, Indeterminate };

inline const char* to_string(StabilityStatus s)
{
    switch (s) {
    case StabilityStatus::EventuallyStable:
        return "EventuallyStable";
    case StabilityStatus::EventuallyUnstable:
        return "EventuallyUnstable";
    case StabilityStatus::Indeterminate:
        return "Indeterminate";
    }
    return "?";
}

template <typename Scalar>
struct StabilityVerdict {
    StabilityStatus status = StabilityStatus::Indeterminate;
    RootSet<Scalar> witness_roots;
    std::optional<Scalar> t1_estimate;
    std::optional<Scalar> branch_real_part;  // limiting Re of the sqrt(t) branches, when that decided the verdict
    std::optional<HurwitzVerdict> hurwitz;
    std::string reason;
};

template <typename Scalar>
Scalar min_real_eigenvalue(const PerturbationProblem<Scalar>& prob, Scalar t)
{
    return eigenvalues(b_of_t(prob, t)).min_real();
}

// Start of the final stretch of a log grid on [t_min, t_max] where every
// eigenvalue of B(t) has Re > 0, sharpened by bisection against the last
// failing grid point. Empty if B(t_max) itself has an eigenvalue with Re <= 0.
template <typename Scalar>
std::optional<Scalar> estimate_threshold(const PerturbationProblem<Scalar>& prob, Scalar t_max,
                                         Scalar t_min = Scalar(1e-3), int points_per_decade = 20)
{
    const Scalar decades = std::log10(t_max / t_min);
    const int points = std::max(2, static_cast<int>(std::ceil(decades * Scalar(points_per_decade))) + 1);
    const std::vector<Scalar> grid = log_grid(t_min, t_max, points);
    if (min_real_eigenvalue(prob, grid.back()) <= Scalar(0)) {
        return std::nullopt;
    }
    int bad = -1;
    for (int j = points - 2; j >= 0; --j) {
        if (min_real_eigenvalue(prob, grid[j]) <= Scalar(0)) {
            bad = j;
            break;
        }
    }
    if (bad < 0) {
        return grid.front();
    }
    Scalar lo = std::log(grid[bad]);
    Scalar hi = std::log(grid[bad + 1]);
    for (int it = 0; it < 60 && hi - lo > Scalar(1e-12); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        if (min_real_eigenvalue(prob, std::exp(mid)) <= Scalar(0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(hi);
}

struct ClassifyOptions {
    bool estimate_threshold = true;
    double t_max = 1e6;
};

template <typename Scalar>
StabilityVerdict<Scalar> classify(const PerturbationProblem<Scalar>& prob, const ClassifyOptions& opts = {})
{
    StabilityVerdict<Scalar> out;
    if (!prob.nzp.holds) {
        out.reason = "NZP condition fails";
        return out;
    }
    AsymptoticReport<Scalar> asym;
    try {
        asym = asymptotics(prob);
    } catch (const NumericalError& e) {
        out.reason = e.what();
        return out;
    }
    out.witness_roots = asym.finite_limits;

    switch (asym.kind) {
    case AsymptoticCase::WvPositive: {
        const HurwitzVerdict hv = routh_hurwitz(asym.pvw);
        out.hurwitz = hv;
        if (hv.status == HurwitzStatus::AllOpenRight) {
            out.status = StabilityStatus::EventuallyStable;
            out.reason = "w^T v > 0 and all roots of p_vw lie in the open right half plane";
            if (opts.estimate_threshold) {
                out.t1_estimate = estimate_threshold(prob, Scalar(opts.t_max));
            }
        } else if (hv.status == HurwitzStatus::NotAllOpenRight) {
            out.status = StabilityStatus::EventuallyUnstable;
            out.reason = "w^T v > 0 and p_vw has a root outside the open right half plane";
        } else {
            out.reason = "Routh array of p_vw has a zero pivot";
        }
        break;
    }
    case AsymptoticCase::WvZeroWAvNonzero: {
        const Scalar re = asym.branches.front().constant->real();
        out.branch_real_part = re;
        if (re <= Scalar(0)) {
            out.status = StabilityStatus::EventuallyUnstable;
            out.reason = "w^T v = 0; two branches diverge along Re = " + std::to_string(static_cast<double>(re));
        } else {
            out.reason = "w^T v = 0 with branch constant Re > 0; no criterion for the finite limits";
        }
        break;
    }
    case AsymptoticCase::WvZeroWAvZero:
        out.reason = "w^T v = w^T A v = 0; expansion order not covered";
        break;
    }
    return out;
}

}  // namespace perron

#endif  // PERRON_PERTURB_HPP
