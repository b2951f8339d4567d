#include "doctest.h"
#include "oracles.hpp"

#include "perron/perturb.hpp"
#include "perron/search.hpp"

using namespace perron;
using oracle::C;
using Poly = RealPolynomial<double>;

namespace {

Problem swap2_problem(Vector<double> v, Vector<double> w)
{
    Matrix<double> h(2, 2);
    h << 0, 1, 1, 0;
    return make_problem(h, v, w);
}

Vector<double> vec(std::initializer_list<double> x)
{
    Vector<double> out(static_cast<Eigen::Index>(x.size()));
    Eigen::Index i = 0;
    for (double d : x) {
        out(i++) = d;
    }
    return out;
}

// Eigenvalues of a 2x2 matrix from trace and determinant.
std::vector<C> eig2(const Matrix<double>& m)
{
    const auto [a, b] = oracle::quadratic_roots(1.0, -m.trace(), m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    return {a, b};
}

}  // namespace

TEST_CASE("make_problem validation")
{
    Matrix<double> h(2, 2);
    h << 0, 1, 1, 0;
    CHECK_THROWS_AS(make_problem(h, vec({1, 0, 0}), vec({1, 0})), DimensionMismatch);
    CHECK_THROWS_AS(make_problem(h, vec({1, -1}), vec({1, 0})), InputError);
    CHECK_THROWS_AS(make_problem(Matrix<double>(Matrix<double>::Identity(2, 2)), vec({1, 1}), vec({1, 1})),
                    NotSimple);
}

TEST_CASE("b_of_t examples")
{
    const Problem ex34 = paper_example_34();
    const double t = 0.7;
    Matrix<double> expected(3, 3);
    expected << 1, -1 + 6 * t, t, 0, 1, -1, -1, 0, 1;
    CHECK((b_of_t(ex34, t) - expected).norm() < 1e-14);
    CHECK((b_of_t(ex34, 0.0) - ex34.a.entries).norm() == 0.0);

    const Problem ex34b = paper_example_34b();
    expected << 1, t - 1, 0, 0, 1, -1, -1, 0, 1;
    CHECK((b_of_t(ex34b, t) - expected).norm() < 1e-14);
}

TEST_CASE("eigenvalues examples")
{
    const Problem ex33 = paper_example_33();
    const std::vector<C> printed{0.2661, C(-0.0284, 0.2495), C(-0.0284, -0.2495)};
    CHECK(oracle::multiset_distance(eigenvalues(b_of_t(ex33, 0.1)).values(), printed) < 5e-4);

    const RootSet<double> id = eigenvalues(Matrix<double>::Identity(3, 3));
    REQUIRE(id.roots.size() == 1);
    CHECK(id.roots[0].multiplicity == 3);
    CHECK(std::abs(id.roots[0].value - 1.0) < 1e-15);

    const double s = 3.0 * std::sqrt(3.0) / 2.0;
    const std::vector<C> cube{4.0, C(-0.5, s), C(-0.5, -s)};
    CHECK(oracle::multiset_distance(eigenvalues(b_of_t(paper_example_34b(), 28.0)).values(), cube) < 1e-9);
}

TEST_CASE("p_vw_lemma16 examples")
{
    SUBCASE("wTv = 0 example gives 7 - lambda")
    {
        const Problem ex34 = paper_example_34();
        const auto mom = krylov_moments(ex34, 3);
        CHECK(mom[0] == 0.0);
        CHECK(mom[1] == doctest::Approx(-1.0));
        CHECK(mom[2] == doctest::Approx(4.0));
        // m_A = lambda^3 - 3 lambda^2 + 3 lambda: c_0 = 3*0 - 3*(-1) + 4, c_1 = -3*0 + (-1), c_2 = 0
        const Poly p = p_vw_lemma16(ex34);
        CHECK(p.degree() == 1);
        CHECK(p[0] == doctest::Approx(7.0));
        CHECK(p[1] == doctest::Approx(-1.0));
    }
    SUBCASE("counterexample coefficients")
    {
        const Poly p = p_vw_lemma16(paper_counterexample_4());
        const double printed[] = {-4.0866, 1.3747, -5.5330, 4.4100};
        REQUIRE(p.degree() == 3);
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(p[k] - printed[k]) <= 5e-5);
        }
    }
    SUBCASE("zero vectors give the zero polynomial")
    {
        Matrix<double> h(2, 2);
        h << 0, 1, 1, 0;
        PerturbationProblem<double> p = swap2_problem(vec({1, 0}), vec({0, 1}));
        p.v.setZero();
        p.w.setZero();
        CHECK(p_vw_lemma16(p).is_zero());
    }
}

TEST_CASE("p_vw_lemma16 matches determinant evaluation at sample points")
{
    oracle::Generator gen(41);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + trial % 5;
        const Problem prob = gen.problem(n);
        const Poly p = p_vw_lemma16(prob);
        if (p.coeffs().size() != static_cast<std::size_t>(n)) {
            continue;  // derogatory A: the determinant difference is a multiple of p_vw
        }
        const Matrix<double> b1 = b_of_t(prob, 1.0);
        for (int k = 0; k < 4; ++k) {
            const C z(gen.uniform(-2, 2), gen.uniform(-2, 2));
            const C expect = oracle::char_det(prob.a.entries, z) - oracle::char_det(b1, z);
            CHECK(std::abs(p(z) - expect) <= 1e-9 * (1 + std::abs(expect)));
        }
    }
}

TEST_CASE("p_vw_det_oracle examples")
{
    const Poly lemma = p_vw_lemma16(paper_counterexample_4());
    const Poly det = p_vw_det_oracle(paper_counterexample_4());
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(lemma[k] - det[k]) <= 1e-8 * std::abs(det[k]));
    }
    const Poly ex34 = p_vw_det_oracle(paper_example_34());
    CHECK(ex34[0] == doctest::Approx(7.0));
    CHECK(ex34[1] == doctest::Approx(-1.0));
    CHECK(std::abs(ex34[2]) < 1e-14);

    PerturbationProblem<double> zero_v = paper_example_34();
    zero_v.v.setZero();
    CHECK(p_vw_det_oracle(zero_v).is_zero());
}

TEST_CASE("p_vw_det_oracle rejects derogatory A")
{
    // H = ones(3,3)/3 ... A has eigenvalue 1 twice with a diagonalizable block.
    Matrix<double> h = Matrix<double>::Constant(3, 3, 1.0);
    const Problem prob = make_problem(h, vec({1, 0, 0}), vec({0, 1, 0}));
    CHECK(minimal_poly(prob.a.entries).degree() == 2);
    CHECK_THROWS_AS(p_vw_det_oracle(prob), NotNonderogatory);
}

TEST_CASE("factorization_residual examples")
{
    oracle::Generator gen(3);
    const Problem any = gen.problem(4);
    CHECK(factorization_residual(any, 0.0) <= 1e-10);

    const Problem cx4 = paper_counterexample_4();
    std::vector<C> points;
    for (int k = 0; k < 8; ++k) {
        points.push_back(std::polar(1.0, gen.uniform(0, 2 * std::numbers::pi)));
    }
    CHECK(factorization_residual(cx4, 1.0, points) <= 1e-8);

    // derogatory A: the det(lambda I - A) / m_A factor is not constant
    const Problem derog = make_problem(Matrix<double>(Matrix<double>::Constant(3, 3, 1.0)), vec({1, 2, 0}),
                                       vec({0, 1, 3}));
    CHECK(factorization_residual(derog, 2.5) <= 1e-10);

    CHECK_THROWS_AS(factorization_residual(cx4, 1.0, {C(0.2, 0.0)}), InputError);
}

TEST_CASE("explicit characteristic polynomial of the wTv = 0 example")
{
    const Problem ex34 = paper_example_34();
    const double t = 5.0;
    const Poly expected{-7 * t, 3 + t, -3.0, 1.0};
    const Poly actual = char_poly(b_of_t(ex34, t));
    for (int k = 0; k <= 3; ++k) {
        CHECK(std::abs(actual[k] - expected[k]) <= 1e-12);
    }
    // the factored form with the explicit polynomial
    for (const C& z : default_sample_points(ex34)) {
        const C lhs = expected(z);
        const C rhs = z * (z * z - 3.0 * z + 3.0) - t * (7.0 - z);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
    CHECK(factorization_residual(ex34, t) <= 1e-10);
}

TEST_CASE("trace_eigenvalues examples")
{
    SUBCASE("counterexample ends with two eigenvalues in the left half plane")
    {
        const auto curves = trace_eigenvalues(paper_counterexample_4(), 1e-3, 1e3, 200);
        int left = 0;
        for (const auto& path : curves.paths) {
            const C end = path.back();
            if (end.real() < 0) {
                ++left;
                CHECK(std::abs(end.real() + 0.1082) < 5e-3);
                CHECK(std::abs(std::abs(end.imag()) - 0.7863) < 5e-3);
            }
        }
        CHECK(left == 2);
        CHECK(curves.a_eigs.count() == 4);
        CHECK(curves.pvw_roots.count() == 3);
    }
    SUBCASE("grid containing t = 0.1")
    {
        const auto curves = trace_eigenvalues(paper_example_33(), 1e-3, 1e1, 5);
        REQUIRE(curves.t_grid[2] == doctest::Approx(0.1).epsilon(1e-12));
        std::vector<C> column;
        for (const auto& path : curves.paths) {
            column.push_back(path[2]);
        }
        const std::vector<C> printed{0.2661, C(-0.0284, 0.2495), C(-0.0284, -0.2495)};
        CHECK(oracle::multiset_distance(column, printed) < 5e-4);
    }
    SUBCASE("n = 2 stays in the right half plane")
    {
        oracle::Generator gen(77);
        for (int k = 0; k < 10; ++k) {
            const auto curves = trace_eigenvalues(gen.problem(2), 1e-3, 1e3, 60);
            for (const auto& path : curves.paths) {
                for (const C& z : path) {
                    CHECK(z.real() > 0.0);
                }
            }
        }
    }
    SUBCASE("columns are the spectrum of B(t)")
    {
        oracle::Generator gen(78);
        const Problem prob = gen.problem(5);
        const auto curves = trace_eigenvalues(prob, 1e-2, 1e2, 30);
        for (std::size_t j = 0; j < curves.t_grid.size(); ++j) {
            std::vector<C> column;
            for (const auto& path : curves.paths) {
                column.push_back(path[j]);
            }
            const auto spec = eigenvalues(b_of_t(prob, curves.t_grid[j])).values();
            CHECK(oracle::multiset_distance(column, spec) < 1e-12);
        }
    }
    SUBCASE("single point grid")
    {
        const auto curves = trace_eigenvalues(paper_example_33(), 0.5, 0.5, 1);
        CHECK(curves.t_grid.size() == 1);
    }
}

TEST_CASE("greedy matching follows nearest neighbours")
{
    const std::vector<C> prev{C(0, 1), C(0, -1), 2.0};
    const std::vector<C> next{2.1, C(0.1, -1), C(0.1, 1)};
    const auto m = match_greedy(prev, next);
    CHECK(m[0] == C(0.1, 1));
    CHECK(m[1] == C(0.1, -1));
    CHECK(m[2] == C(2.1));
}

TEST_CASE("closed_form_n2 examples")
{
    SUBCASE("v = w = e1")
    {
        const Problem p = swap2_problem(vec({1, 0}), vec({1, 0}));
        const auto cf = closed_form_n2(p);
        CHECK(cf.mu == doctest::Approx(2.0));
        REQUIRE(cf.zeta.has_value());
        CHECK(*cf.zeta == doctest::Approx(1.0));
        for (double t : {0.5, 3.0, 40.0}) {
            const Poly q = cf.quadratic(t);
            CHECK(q[2] == doctest::Approx(1.0));
            CHECK(q[1] == doctest::Approx(-(2 + t)));
            CHECK(q[0] == doctest::Approx(t));
            CHECK(oracle::multiset_distance(roots(q).values(), eig2(b_of_t(p, t))) < 1e-12);
        }
    }
    SUBCASE("v = e1, w = e2 has wTv = 0 and asymptote Re = mu / 2")
    {
        const Problem p = swap2_problem(vec({1, 0}), vec({0, 1}));
        const auto cf = closed_form_n2(p);
        CHECK_FALSE(cf.zeta.has_value());
        REQUIRE(cf.asymptote_re.has_value());
        CHECK(*cf.asymptote_re == doctest::Approx(1.0));
        for (const C& z : eig2(b_of_t(p, 1e6))) {
            CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("t = 0 gives the spectrum of A")
    {
        oracle::Generator gen(4);
        for (int k = 0; k < 10; ++k) {
            const Problem p = gen.problem(2);
            const auto cf = closed_form_n2(p);
            CHECK(oracle::multiset_distance(roots(cf.quadratic(0.0)).values(), {0.0, cf.mu}) < 1e-12);
        }
    }
    SUBCASE("dimension check")
    {
        CHECK_THROWS_AS(closed_form_n2(paper_example_33()), DimensionMismatch);
    }
}

TEST_CASE("n = 2 second eigenvalue approaches zeta with first-order coefficient -1/(w^T (zeta - A)^-2 v)")
{
    oracle::Generator gen(12);
    for (int k = 0; k < 20; ++k) {
        const Problem p = gen.problem(2, true);
        const auto cf = closed_form_n2(p);
        REQUIRE(cf.first_order.has_value());
        auto error = [&](double t) {
            const auto e = eig2(b_of_t(p, t));
            const C second = std::abs(e[0] - *cf.zeta) < std::abs(e[1] - *cf.zeta) ? e[0] : e[1];
            return std::abs(second.real() - *cf.zeta - *cf.first_order / t);
        };
        const double e3 = error(1e3);
        const double e4 = error(1e4);
        CHECK((e4 < 1e-14 || e3 / e4 >= 50.0));
    }
}

TEST_CASE("closed_form_n3 examples")
{
    SUBCASE("wTv = 0 example degenerates to 7 - lambda")
    {
        const auto cf = closed_form_n3(paper_example_34());
        CHECK(cf.pvw_quadratic.degree() == 1);
        CHECK(cf.pvw_quadratic[0] == doctest::Approx(7.0));
        CHECK(cf.pvw_quadratic[1] == doctest::Approx(-1.0));
    }
    SUBCASE("3x3 cycle example has roots in the open right half plane")
    {
        const Problem ex33 = paper_example_33();
        const auto cf = closed_form_n3(ex33);
        CHECK(roots(cf.pvw_quadratic).min_real() > 0.0);
        CHECK(cf.re_sign_value > 0.0);
        const Poly lemma = p_vw_lemma16(ex33);
        for (int k = 0; k < 3; ++k) {
            CHECK(cf.pvw_quadratic[k] == doctest::Approx(lemma[k]).epsilon(1e-9));
        }
    }
    SUBCASE("v = w with a shared positive entry")
    {
        oracle::Generator gen(6);
        for (int k = 0; k < 50; ++k) {
            const Matrix<double> h = gen.irreducible(3);
            const Vector<double> v = gen.nonneg(3);
            try {
                CHECK(closed_form_n3(make_problem(h, v, v)).re_sign_value > 0.0);
            } catch (const NotSimple&) {
            }
        }
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(closed_form_n3(paper_counterexample_4()), DimensionMismatch);
        PerturbationProblem<double> p = paper_example_33();
        p.a.entries += 0.5 * Matrix<double>::Identity(3, 3);
        CHECK_THROWS_AS(closed_form_n3(p), NonsingularConstantTerm);
    }
}

TEST_CASE("asymptotics examples")
{
    SUBCASE("counterexample")
    {
        const auto a = asymptotics(paper_counterexample_4());
        CHECK(a.kind == AsymptoticCase::WvPositive);
        CHECK(a.divergent_count == 1);
        REQUIRE(a.branches.size() == 1);
        CHECK(a.branches[0].leading.real() == doctest::Approx(4.41));
        const std::vector<C> printed{1.4710, C(-0.1082, 0.7863), C(-0.1082, -0.7863)};
        CHECK(oracle::multiset_distance(a.finite_limits.values(), printed) < 5e-4);
    }
    SUBCASE("wTv = 0, wTAv = -1")
    {
        const auto a = asymptotics(paper_example_34());
        CHECK(a.kind == AsymptoticCase::WvZeroWAvNonzero);
        CHECK(a.divergent_count == 2);
        REQUIRE(a.branches.size() == 2);
        for (const auto& b : a.branches) {
            CHECK(b.exponent == 0.5);
            CHECK(std::abs(std::abs(b.leading) - 1.0) < 1e-12);
            CHECK(std::abs(b.leading.real()) < 1e-12);
            REQUIRE(b.constant.has_value());
            CHECK(b.constant->real() == doctest::Approx(-2.0));
        }
        CHECK(oracle::multiset_distance(a.finite_limits.values(), {7.0}) < 1e-12);
    }
    SUBCASE("wTv = wTAv = 0")
    {
        const auto a = asymptotics(paper_example_34b());
        CHECK(a.kind == AsymptoticCase::WvZeroWAvZero);
        CHECK(a.wa2v == doctest::Approx(1.0));
        CHECK(a.divergent_count == 3);
        CHECK(a.finite_limits.count() == 0);
    }
}

TEST_CASE("WvPositive: largest eigenvalue stays O(1) from t wTv and the rest approach p_vw roots")
{
    oracle::Generator gen(19);
    for (int k = 0; k < 20; ++k) {
        const Problem p = gen.problem(3 + k % 3, true);
        const auto a = asymptotics(p);
        REQUIRE(a.kind == AsymptoticCase::WvPositive);
        auto split = [&](double t) {
            std::vector<C> z = eigenvalues(b_of_t(p, t)).values();
            std::sort(z.begin(), z.end(), [](C x, C y) { return x.real() < y.real(); });
            const double gap = std::abs(z.back() - t * p.wv);
            z.pop_back();
            return std::make_pair(gap, z);
        };
        const auto [gap4, rest4] = split(1e4);
        const auto [gap6, rest6] = split(1e6);
        CHECK(gap6 <= 2.0 * gap4 + 1e-6);
        if (a.finite_limits.count() == static_cast<int>(rest6.size())) {
            // O(1/t) for simple roots, O(1/sqrt(t)) at worst for a double root
            const double d4 = oracle::multiset_distance(rest4, a.finite_limits.values());
            const double d6 = oracle::multiset_distance(rest6, a.finite_limits.values());
            CHECK((d6 < 1e-9 || d6 <= d4 / 5.0));
        }
    }
}

TEST_CASE("classify examples")
{
    SUBCASE("counterexample")
    {
        const auto v = classify(paper_counterexample_4());
        CHECK(v.status == StabilityStatus::EventuallyUnstable);
        int left = 0;
        for (const auto& r : v.witness_roots.roots) {
            left += r.value.real() <= 0 ? r.multiplicity : 0;
        }
        CHECK(left == 2);
    }
    SUBCASE("3x3 cycle example")
    {
        const auto v = classify(paper_example_33());
        CHECK(v.status == StabilityStatus::EventuallyStable);
        REQUIRE(v.t1_estimate.has_value());
        CHECK(*v.t1_estimate > 0.1);
    }
    SUBCASE("wTv = 0 example")
    {
        const auto v = classify(paper_example_34());
        CHECK(v.status == StabilityStatus::EventuallyUnstable);
        REQUIRE(v.branch_real_part.has_value());
        CHECK(*v.branch_real_part == doctest::Approx(-2.0));
    }
    SUBCASE("wTv = wTAv = 0 is not decided")
    {
        CHECK(classify(paper_example_34b()).status == StabilityStatus::Indeterminate);
    }
    SUBCASE("NZP failure")
    {
        Matrix<double> h(2, 2);
        h << 1, 0, 0, 0;
        const Problem p = make_problem(h, vec({1, 0}), vec({0, 1}));
        const auto v = classify(p);
        CHECK(v.status == StabilityStatus::Indeterminate);
        CHECK(v.reason.find("NZP") != std::string::npos);
    }
    SUBCASE("1x1")
    {
        Matrix<double> h = Matrix<double>::Zero(1, 1);
        const Problem p = make_problem(h, vec({1}), vec({1}));
        const Poly pvw = p_vw_lemma16(p);
        CHECK(pvw.degree() == 0);
        CHECK(pvw[0] == 1.0);
        CHECK(classify(p).status == StabilityStatus::EventuallyStable);
    }
}

TEST_CASE("estimate_threshold")
{
    SUBCASE("3x3 cycle example: unstable at t = 0.1, stable after the estimate")
    {
        const Problem p = paper_example_33();
        const auto t1 = estimate_threshold(p, 1e4);
        REQUIRE(t1.has_value());
        CHECK(*t1 > 0.1);
        CHECK(min_real_eigenvalue(p, 0.1) < 0.0);
        for (double f : {1.0001, 2.0, 10.0, 1000.0}) {
            CHECK(min_real_eigenvalue(p, *t1 * f) > 0.0);
        }
    }
    SUBCASE("n = 2 is stable on the whole grid")
    {
        oracle::Generator gen(2);
        for (int k = 0; k < 5; ++k) {
            const auto t1 = estimate_threshold(gen.problem(2), 1e3);
            REQUIRE(t1.has_value());
            CHECK(*t1 == doctest::Approx(1e-3));
        }
    }
    SUBCASE("unstable at t_max gives no estimate")
    {
        CHECK_FALSE(estimate_threshold(paper_counterexample_4(), 1e4).has_value());
    }
}

TEST_CASE("real eigenvalues of B(t) are positive")
{
    oracle::Generator gen(101);
    const auto grid = log_grid(1e-3, 1e3, 25);
    for (int k = 0; k < 60; ++k) {
        const Problem p = gen.problem(2 + k % 5);
        for (double t : grid) {
            for (const C& z : eigenvalues(b_of_t(p, t)).values()) {
                if (std::abs(z.imag()) <= 1e-9) {
                    CHECK(z.real() > -1e-9);
                }
            }
        }
    }
}

TEST_CASE("long double instantiation")
{
    Matrix<long double> h(3, 3);
    h << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    Vector<long double> v(3), w(3);
    v << 1, 0, 0;
    w << 0, 6, 1;
    const auto p = make_problem(h, v, w);
    const auto pvw = p_vw_lemma16(p);
    CHECK(static_cast<double>(pvw[0]) == doctest::Approx(7.0));
    CHECK(classify(p).status == StabilityStatus::EventuallyUnstable);
}
