#ifndef PERRON_POLYNOMIAL_HPP
#define PERRON_POLYNOMIAL_HPP

#include "perron/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace perron {

// Real polynomial with coefficients stored in ascending degree order.
// Trailing coefficients below lead_tolerance() do not count towards the degree,
// so a polynomial whose leading terms cancel numerically reports the lower degree.
template <typename Scalar>
class RealPolynomial {
public:
    RealPolynomial() : coeffs_{Scalar(0)} {}
    explicit RealPolynomial(std::vector<Scalar> coeffs) : coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty()) {
            coeffs_.push_back(Scalar(0));
        }
    }
    RealPolynomial(std::initializer_list<Scalar> coeffs) : RealPolynomial(std::vector<Scalar>(coeffs)) {}

    const std::vector<Scalar>& coeffs() const { return coeffs_; }

    // Coefficient of lambda^k, zero past the stored length.
    Scalar operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Scalar(0); }

    Scalar max_abs_coeff() const
    {
        Scalar m(0);
        for (Scalar c : coeffs_) {
            m = std::max(m, std::abs(c));
        }
        return m;
    }

    Scalar lead_tolerance() const { return Scalar(tol::lead) * max_abs_coeff(); }

    // -1 for the zero polynomial.
    int degree() const
    {
        const Scalar eps = lead_tolerance();
        for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
            if (std::abs(coeffs_[k]) > eps) {
                return k;
            }
        }
        return -1;
    }

    bool is_zero() const { return degree() < 0; }

    RealPolynomial trimmed() const
    {
        const int d = degree();
        if (d < 0) {
            return RealPolynomial();
        }
        return RealPolynomial(std::vector<Scalar>(coeffs_.begin(), coeffs_.begin() + d + 1));
    }

    Scalar leading() const
    {
        const int d = degree();
        return d < 0 ? Scalar(0) : coeffs_[d];
    }

    template <typename T>
    T operator()(const T& x) const
    {
        T acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * x + T(*it);
        }
        return acc;
    }

    // sum |c_k| |x|^k, the natural scale for the rounding error of Horner evaluation.
    Scalar abs_eval(Scalar r) const
    {
        Scalar acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * r + std::abs(*it);
        }
        return acc;
    }

    RealPolynomial derivative() const
    {
        if (coeffs_.size() <= 1) {
            return RealPolynomial();
        }
        std::vector<Scalar> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            d[k - 1] = Scalar(k) * coeffs_[k];
        }
        return RealPolynomial(std::move(d));
    }

    // p(-lambda)
    RealPolynomial reflected() const
    {
        std::vector<Scalar> c = coeffs_;
        for (std::size_t k = 1; k < c.size(); k += 2) {
            c[k] = -c[k];
        }
        return RealPolynomial(std::move(c));
    }

    friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b)
    {
        std::vector<Scalar> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = a[k] + b[k];
        }
        return RealPolynomial(std::move(c));
    }

    friend RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b)
    {
        std::vector<Scalar> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = a[k] - b[k];
        }
        return RealPolynomial(std::move(c));
    }

    friend RealPolynomial operator*(Scalar s, const RealPolynomial& p)
    {
        std::vector<Scalar> c = p.coeffs_;
        for (Scalar& x : c) {
            x *= s;
        }
        return RealPolynomial(std::move(c));
    }

    friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b)
    {
        std::vector<Scalar> c(a.coeffs_.size() + b.coeffs_.size() - 1, Scalar(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
            }
        }
        return RealPolynomial(std::move(c));
    }

private:
    std::vector<Scalar> coeffs_;
};

// Quotient and remainder of num / den. den must be nonzero.
template <typename Scalar>
std::pair<RealPolynomial<Scalar>, RealPolynomial<Scalar>> divmod(const RealPolynomial<Scalar>& num,
                                                                 const RealPolynomial<Scalar>& den)
{
    const int dd = den.degree();
    if (dd < 0) {
        throw std::invalid_argument("polynomial division by zero");
    }
    std::vector<Scalar> rem = num.coeffs();
    const int dn = static_cast<int>(rem.size()) - 1;
    if (dn < dd) {
        return {RealPolynomial<Scalar>(), num};
    }
    std::vector<Scalar> quot(dn - dd + 1, Scalar(0));
    const Scalar lead = den[dd];
    for (int k = dn - dd; k >= 0; --k) {
        const Scalar q = rem[k + dd] / lead;
        quot[k] = q;
        for (int j = 0; j <= dd; ++j) {
            rem[k + j] -= q * den[j];
        }
    }
    rem.resize(std::max(dd, 1));
    return {RealPolynomial<Scalar>(std::move(quot)), RealPolynomial<Scalar>(std::move(rem))};
}

template <typename Scalar>
struct Root {
    Complex<Scalar> value;
    int multiplicity = 1;
};

// Distinct roots (after clustering) with multiplicities.
template <typename Scalar>
struct RootSet {
    std::vector<Root<Scalar>> roots;
    Scalar residual = Scalar(0);

    int count() const
    {
        int c = 0;
        for (const auto& r : roots) {
            c += r.multiplicity;
        }
        return c;
    }

    // Every root repeated by multiplicity.
    std::vector<Complex<Scalar>> values() const
    {
        std::vector<Complex<Scalar>> out;
        for (const auto& r : roots) {
            out.insert(out.end(), r.multiplicity, r.value);
        }
        return out;
    }

    Scalar min_real() const
    {
        Scalar m = std::numeric_limits<Scalar>::infinity();
        for (const auto& r : roots) {
            m = std::min(m, r.value.real());
        }
        return m;
    }
};

namespace detail {

template <typename Scalar>
bool complex_less(const Complex<Scalar>& a, const Complex<Scalar>& b)
{
    if (a.real() != b.real()) {
        return a.real() < b.real();
    }
    return a.imag() < b.imag();
}

// Snap near-real values onto the axis and make complex values appear in exact
// conjugate pairs. Values are expected to come from a real problem.
template <typename Scalar>
void symmetrize_conjugates(std::vector<Complex<Scalar>>& z, Scalar conj_tol)
{
    for (auto& x : z) {
        if (std::abs(x.imag()) <= conj_tol * std::max(Scalar(1), std::abs(x))) {
            x = Complex<Scalar>(x.real(), Scalar(0));
        }
    }
    std::vector<bool> used(z.size(), false);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (used[i] || z[i].imag() <= Scalar(0)) {
            continue;
        }
        std::size_t best = z.size();
        Scalar best_dist = std::numeric_limits<Scalar>::infinity();
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (j == i || used[j] || z[j].imag() >= Scalar(0)) {
                continue;
            }
            const Scalar d = std::abs(z[j] - std::conj(z[i]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == z.size()) {
            continue;
        }
        const Complex<Scalar> avg = (z[i] + std::conj(z[best])) / Scalar(2);
        z[i] = avg;
        z[best] = std::conj(avg);
        used[i] = used[best] = true;
    }
    std::sort(z.begin(), z.end(), complex_less<Scalar>);
}

}  // namespace detail

// Greedy clustering: each value joins the first cluster whose seed lies within
// cluster_tol, otherwise it seeds a new one. Cluster values are means.
template <typename Scalar>
RootSet<Scalar> cluster_roots(std::vector<Complex<Scalar>> values, Scalar cluster_tol)
{
    std::sort(values.begin(), values.end(), detail::complex_less<Scalar>);
    std::vector<Complex<Scalar>> seeds;
    std::vector<Complex<Scalar>> sums;
    std::vector<int> counts;
    for (const auto& z : values) {
        bool placed = false;
        for (std::size_t c = 0; c < seeds.size(); ++c) {
            if (std::abs(z - seeds[c]) <= cluster_tol) {
                sums[c] += z;
                ++counts[c];
                placed = true;
                break;
            }
        }
        if (!placed) {
            seeds.push_back(z);
            sums.push_back(z);
            counts.push_back(1);
        }
    }
    RootSet<Scalar> out;
    for (std::size_t c = 0; c < seeds.size(); ++c) {
        out.roots.push_back({sums[c] / Scalar(counts[c]), counts[c]});
    }
    return out;
}

// All complex roots of p by Aberth-Ehrlich simultaneous iteration.
// Exact zero low-order coefficients are deflated as exact roots at 0.
template <typename Scalar>
RootSet<Scalar> roots(const RealPolynomial<Scalar>& poly)
{
    using C = Complex<Scalar>;
    const RealPolynomial<Scalar> p = poly.trimmed();
    const int deg = p.degree();
    if (deg < 1) {
        throw std::invalid_argument("roots: polynomial degree must be at least 1");
    }

    int zeros = 0;
    while (p[zeros] == Scalar(0)) {
        ++zeros;
    }
    std::vector<Scalar> c(p.coeffs().begin() + zeros, p.coeffs().end());
    const int d = deg - zeros;
    const Scalar lead = c[d];
    for (Scalar& x : c) {
        x /= lead;
    }
    const RealPolynomial<Scalar> q(c);
    const RealPolynomial<Scalar> dq = q.derivative();

    std::vector<C> z(d);
    if (d > 0) {
        Scalar radius(0);
        for (int k = 0; k < d; ++k) {
            radius = std::max(radius, std::abs(c[k]));
        }
        radius += Scalar(1);
        const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
        for (int k = 0; k < d; ++k) {
            const Scalar angle = two_pi * Scalar(k) / Scalar(d) + Scalar(0.4);
            z[k] = std::polar(radius, angle);
        }

        const Scalar eps = std::numeric_limits<Scalar>::epsilon();
        std::vector<bool> done(d, false);
        int iter = 0;
        for (; iter < tol::max_root_iter; ++iter) {
            bool all_done = true;
            for (int i = 0; i < d; ++i) {
                if (done[i]) {
                    continue;
                }
                const C pz = q(z[i]);
                const Scalar scale = q.abs_eval(std::abs(z[i]));
                if (std::abs(pz) <= Scalar(8) * eps * scale) {
                    done[i] = true;
                    continue;
                }
                all_done = false;
                const C ratio = pz / dq(z[i]);
                C sum(0);
                for (int j = 0; j < d; ++j) {
                    if (j != i) {
                        sum += C(1) / (z[i] - z[j]);
                    }
                }
                const C step = ratio / (C(1) - ratio * sum);
                z[i] -= step;
                if (std::abs(step) <= Scalar(1e-13) * std::abs(z[i])) {
                    done[i] = true;
                }
            }
            if (all_done) {
                break;
            }
        }
        if (iter == tol::max_root_iter) {
            throw ConvergenceFailure("roots: Aberth iteration did not converge in " +
                                     std::to_string(tol::max_root_iter) + " iterations");
        }
    }
    z.insert(z.end(), zeros, C(0));
    detail::symmetrize_conjugates(z, Scalar(tol::conj));

    Scalar residual(0);
    for (const auto& x : z) {
        const Scalar scale = p.abs_eval(std::abs(x));
        if (scale > Scalar(0)) {
            residual = std::max(residual, std::abs(p(x)) / scale);
        }
    }
    Scalar mag(1);
    for (const auto& x : z) {
        mag = std::max(mag, std::abs(x));
    }
    RootSet<Scalar> out = cluster_roots(std::move(z), Scalar(tol::cluster) * mag);
    out.residual = residual;
    return out;
}

enum class HurwitzStatus { AllOpenRight, NotAllOpenRight, Marginal };

inline const char* to_string(HurwitzStatus s)
{
    switch (s) {
    case HurwitzStatus::AllOpenRight:
        return "AllOpenRight";
    case HurwitzStatus::NotAllOpenRight:
        return "NotAllOpenRight";
    case HurwitzStatus::Marginal:
        return "Marginal";
    }
    return "?";
}

struct HurwitzVerdict {
    HurwitzStatus status = HurwitzStatus::Marginal;
    std::optional<int> first_failure;  // row of the Routh array that decided a non-stable verdict
};

// Decides whether every root of p has strictly positive real part, by running
// the classical (left half plane) Routh array on p(-lambda). A nonzero constant
// has no roots and is reported AllOpenRight; the zero polynomial is Marginal.
template <typename Scalar>
HurwitzVerdict routh_hurwitz(const RealPolynomial<Scalar>& poly)
{
    const RealPolynomial<Scalar> p = poly.trimmed();
    const int n = p.degree();
    if (n < 0) {
        return {HurwitzStatus::Marginal, 0};
    }
    if (n == 0) {
        return {HurwitzStatus::AllOpenRight, std::nullopt};
    }
    RealPolynomial<Scalar> q = p.reflected();
    if (q[n] < Scalar(0)) {
        q = Scalar(-1) * q;
    }

    const int width = n / 2 + 1;
    std::vector<std::vector<Scalar>> rows(n + 1, std::vector<Scalar>(width, Scalar(0)));
    for (int k = 0; k <= n; ++k) {
        const int row = k % 2;
        rows[row][k / 2] = q[n - k];
    }
    auto row_scale = [&](int r) {
        Scalar m(0);
        for (Scalar x : rows[r]) {
            m = std::max(m, std::abs(x));
        }
        return m;
    };
    if (rows[0][0] <= Scalar(0)) {
        return {HurwitzStatus::Marginal, 0};
    }
    for (int r = 1; r <= n; ++r) {
        if (r >= 2) {
            const Scalar a = rows[r - 2][0];
            const Scalar b = rows[r - 1][0];
            for (int j = 0; j + 1 < width; ++j) {
                rows[r][j] = (b * rows[r - 2][j + 1] - a * rows[r - 1][j + 1]) / b;
            }
        }
        const Scalar parent = std::max(row_scale(r - 1), r >= 2 ? row_scale(r - 2) : Scalar(0));
        const Scalar pivot = rows[r][0];
        if (std::abs(pivot) <= Scalar(tol::pivot) * parent) {
            return {HurwitzStatus::Marginal, r};
        }
        if (pivot < Scalar(0)) {
            return {HurwitzStatus::NotAllOpenRight, r};
        }
    }
    return {HurwitzStatus::AllOpenRight, std::nullopt};
}

template <typename Scalar>
struct FaddeevLeverrier {
    RealPolynomial<Scalar> poly;  // det(lambda I - A), monic
    Matrix<Scalar> last_term;     // M_n; adj(A) = (-1)^(n-1) M_n
};

// M_1 = I, c_{n-1} = -tr(A); M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
template <typename Derived>
FaddeevLeverrier<typename Derived::Scalar> faddeev_leverrier(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.rows();
    if (n != a.cols() || n < 1) {
        throw DimensionMismatch("faddeev_leverrier: matrix must be square and nonempty");
    }
    std::vector<Scalar> c(n + 1, Scalar(0));
    c[n] = Scalar(1);
    Matrix<Scalar> m = Matrix<Scalar>::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (k > 1) {
            m = a * m;
            m.diagonal().array() += c[n - k + 1];
        }
        c[n - k] = -(a * m).trace() / Scalar(k);
    }
    return {RealPolynomial<Scalar>(std::move(c)), std::move(m)};
}

// La Budde's recurrence on the Hessenberg form. Unlike the Faddeev-LeVerrier
// traces it stays accurate when ||A|| is large, e.g. B(t) at big t.
template <typename Derived>
RealPolynomial<typename Derived::Scalar> char_poly(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.rows();
    if (n != a.cols() || n < 1) {
        throw DimensionMismatch("char_poly: matrix must be square and nonempty");
    }
    Matrix<Scalar> h = a;
    if (n > 2) {
        h = Eigen::HessenbergDecomposition<Matrix<Scalar>>(h).matrixH();
    }
    // p[i] = det(lambda I - H[0..i, 0..i]), ascending coefficients
    std::vector<std::vector<Scalar>> p(n + 1);
    p[0] = {Scalar(1)};
    for (Eigen::Index i = 1; i <= n; ++i) {
        std::vector<Scalar> next(i + 1, Scalar(0));
        const std::vector<Scalar>& prev = p[i - 1];
        for (std::size_t k = 0; k < prev.size(); ++k) {
            next[k + 1] += prev[k];
            next[k] -= h(i - 1, i - 1) * prev[k];
        }
        Scalar beta(1);
        for (Eigen::Index m = 1; m < i; ++m) {
            beta *= h(i - m, i - m - 1);
            const Scalar f = h(i - m - 1, i - 1) * beta;
            for (std::size_t k = 0; k < p[i - m - 1].size(); ++k) {
                next[k] -= f * p[i - m - 1][k];
            }
        }
        p[i] = std::move(next);
    }
    return RealPolynomial<Scalar>(std::move(p[n]));
}

// Minimal polynomial from the rank of the Krylov sequence vec(I), vec(A), vec(A^2), ...
// Columns are normalized before the singular-value rank test. If no power below n
// is dependent the result is the characteristic polynomial.
template <typename Derived>
RealPolynomial<typename Derived::Scalar> minimal_poly(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.rows();
    if (n != a.cols() || n < 1) {
        throw DimensionMismatch("minimal_poly: matrix must be square and nonempty");
    }
    const Eigen::Index nn = n * n;
    Matrix<Scalar> krylov(nn, n);
    Vector<Scalar> norms(n);
    Matrix<Scalar> power = Matrix<Scalar>::Identity(n, n);

    for (Eigen::Index k = 0; k < n; ++k) {
        if (k > 0) {
            power = a * power;
        }
        const Scalar nrm = power.norm();
        norms(k) = nrm;
        if (nrm == Scalar(0)) {
            // A^k = 0: minimal polynomial is lambda^k.
            std::vector<Scalar> c(k + 1, Scalar(0));
            c[k] = Scalar(1);
            return RealPolynomial<Scalar>(std::move(c));
        }
        krylov.col(k) = Eigen::Map<const Vector<Scalar>>(power.data(), nn) / nrm;
        if (k == 0) {
            continue;
        }
        const auto cols = krylov.leftCols(k + 1);
        Eigen::JacobiSVD<Matrix<Scalar>> svd(cols, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector<Scalar>& sv = svd.singularValues();
        const Scalar cutoff = Scalar(tol::rank) * sv(0);
        // A decision that would flip if the cutoff moved by a factor of 10 is not trusted.
        if (sv(k) > cutoff / Scalar(10) && sv(k) <= Scalar(10) * cutoff) {
            throw IllConditioned("minimal_poly: smallest singular value at degree " + std::to_string(k) +
                                 " is within a factor 10 of the rank cutoff");
        }
        if (sv(k) > cutoff) {
            continue;
        }
        // A^k = -sum_{j<k} m_j A^j, solved on normalized columns then rescaled.
        const Vector<Scalar> rhs = krylov.col(k);
        const Vector<Scalar> sol = krylov.leftCols(k).colPivHouseholderQr().solve(rhs);
        std::vector<Scalar> c(k + 1);
        c[k] = Scalar(1);
        for (Eigen::Index j = 0; j < k; ++j) {
            c[j] = -sol(j) * norms(k) / norms(j);
        }
        return RealPolynomial<Scalar>(std::move(c));
    }
    return char_poly(a);
}

}  // namespace perron

#endif  // PERRON_POLYNOMIAL_HPP
