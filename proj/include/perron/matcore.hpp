#ifndef PERRON_MATCORE_HPP
#define PERRON_MATCORE_HPP

#include "perron/polynomial.hpp"
#include "perron/types.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace perron {

// Square matrix with finite, entrywise nonnegative entries.
template <typename Scalar>
class NonnegativeMatrix {
public:
    explicit NonnegativeMatrix(Matrix<Scalar> entries) : entries_(std::move(entries))
    {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
            throw DimensionMismatch("nonnegative matrix must be square with n >= 1");
        }
        for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
            for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
                const Scalar x = entries_(i, j);
                if (!std::isfinite(static_cast<double>(x)) || x < Scalar(0)) {
                    throw InputError("matrix entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                     ") is negative or not finite");
                }
            }
        }
    }

    Eigen::Index size() const { return entries_.rows(); }
    const Matrix<Scalar>& matrix() const { return entries_; }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

private:
    Matrix<Scalar> entries_;
};

// A = rho(H) I - H.
template <typename Scalar>
struct SingularMMatrix {
    Matrix<Scalar> entries;
    Scalar rho = Scalar(0);

    Eigen::Index size() const { return entries.rows(); }
};

template <typename Scalar>
struct SpectralRadius {
    Scalar rho = Scalar(0);
    bool simple = false;
};

template <typename Scalar>
struct PerronPair {
    Vector<Scalar> right;  // z_r
    Vector<Scalar> left;   // z_l
    bool simple = false;
};

template <typename Scalar>
struct NzpReport {
    Scalar lv = Scalar(0);  // z_l^T v
    Scalar wr = Scalar(0);  // w^T z_r
    bool holds = false;
};

// The digraph has an edge i -> j iff H(i,j) > 0. Irreducible iff it is strongly
// connected, i.e. vertex 0 reaches everything forwards and backwards.
template <typename Scalar>
bool is_irreducible(const NonnegativeMatrix<Scalar>& h)
{
    const Eigen::Index n = h.size();
    auto reaches_all = [&](bool transpose) {
        std::vector<bool> seen(n, false);
        std::queue<Eigen::Index> todo;
        seen[0] = true;
        todo.push(0);
        Eigen::Index count = 1;
        while (!todo.empty()) {
            const Eigen::Index i = todo.front();
            todo.pop();
            for (Eigen::Index j = 0; j < n; ++j) {
                const Scalar x = transpose ? h(j, i) : h(i, j);
                if (x > Scalar(0) && !seen[j]) {
                    seen[j] = true;
                    ++count;
                    todo.push(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

// Full spectrum through Hessenberg QR. The residual is the worst scaled
// eigenpair residual |M x - lambda x| / (|M| |x|).
template <typename Derived>
RootSet<typename Derived::Scalar> eigenvalues(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    using C = Complex<Scalar>;
    const Matrix<Scalar> mat = m;
    if (mat.rows() != mat.cols() || mat.rows() < 1) {
        throw DimensionMismatch("eigenvalues: matrix must be square and nonempty");
    }
    Eigen::EigenSolver<Matrix<Scalar>> solver(mat, true);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("eigenvalues: QR iteration did not converge");
    }
    const auto values = solver.eigenvalues();
    const auto vectors = solver.eigenvectors();
    const Matrix<C> cm = mat.template cast<C>();
    const Scalar mnorm = std::max(inf_norm(mat), std::numeric_limits<Scalar>::min());

    std::vector<C> z(values.size());
    Scalar residual(0);
    Scalar mag(1);
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        z[k] = values(k);
        mag = std::max(mag, std::abs(z[k]));
        const auto x = vectors.col(k);
        const Scalar xn = x.norm();
        if (xn > Scalar(0)) {
            residual = std::max(residual, (cm * x - values(k) * x).norm() / (mnorm * xn));
        }
    }
    detail::symmetrize_conjugates(z, Scalar(tol::conj));
    RootSet<Scalar> out = cluster_roots(std::move(z), Scalar(tol::cluster) * mag);
    out.residual = residual;
    return out;
}

// rho is the largest real part in the spectrum, which for a nonnegative matrix is
// the Perron root and equals the largest modulus. simple means rho is an
// algebraically simple eigenvalue: exactly one computed eigenvalue lies within
// tol_cluster of it.
template <typename Scalar>
SpectralRadius<Scalar> spectral_radius(const NonnegativeMatrix<Scalar>& h)
{
    const std::vector<Complex<Scalar>> z = eigenvalues(h.matrix()).values();
    Scalar rho = -std::numeric_limits<Scalar>::infinity();
    for (const auto& x : z) {
        rho = std::max(rho, x.real());
    }
    rho = std::max(rho, Scalar(0));
    const Scalar cluster = Scalar(tol::cluster) * std::max(Scalar(1), rho);
    int near = 0;
    for (const auto& x : z) {
        if (std::abs(x - Complex<Scalar>(rho)) <= cluster) {
            ++near;
        }
    }
    return {rho, near == 1};
}

namespace detail {

// Null vector of a matrix with a one-dimensional (numerical) kernel: full-pivot
// elimination, drop the last (smallest) pivot, back-substitute with the free
// variable set to one.
template <typename Scalar>
Vector<Scalar> null_vector(const Matrix<Scalar>& m)
{
    const Eigen::Index n = m.rows();
    Vector<Scalar> y = Vector<Scalar>::Zero(n);
    y(n - 1) = Scalar(1);
    if (n > 1) {
        Eigen::FullPivLU<Matrix<Scalar>> lu(m);
        const Matrix<Scalar>& packed = lu.matrixLU();
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            Scalar acc(0);
            for (Eigen::Index j = i + 1; j < n; ++j) {
                acc += packed(i, j) * y(j);
            }
            y(i) = -acc / packed(i, i);
        }
        y = lu.permutationQ() * y;
    }
    return y / y.norm();
}

template <typename Scalar>
void normalize_sign(Vector<Scalar>& z)
{
    Eigen::Index k = 0;
    z.cwiseAbs().maxCoeff(&k);
    if (z(k) < Scalar(0)) {
        z = -z;
    }
}

}  // namespace detail

template <typename Scalar>
PerronPair<Scalar> perron_pair(const NonnegativeMatrix<Scalar>& h, const SpectralRadius<Scalar>& sr)
{
    if (!sr.simple) {
        throw NotSimple("spectral radius is not a simple eigenvalue");
    }
    const Eigen::Index n = h.size();
    const Matrix<Scalar> shifted = sr.rho * Matrix<Scalar>::Identity(n, n) - h.matrix();
    PerronPair<Scalar> out;
    out.right = detail::null_vector<Scalar>(shifted);
    out.left = detail::null_vector<Scalar>(shifted.transpose());
    detail::normalize_sign(out.right);
    detail::normalize_sign(out.left);
    out.simple = true;
    return out;
}

template <typename Scalar>
PerronPair<Scalar> perron_pair(const NonnegativeMatrix<Scalar>& h)
{
    return perron_pair(h, spectral_radius(h));
}

template <typename Scalar>
NzpReport<Scalar> check_nzp(const PerronPair<Scalar>& pair, const Vector<Scalar>& v, const Vector<Scalar>& w)
{
    if (v.size() != pair.right.size() || w.size() != pair.right.size()) {
        throw DimensionMismatch("check_nzp: v and w must have length n");
    }
    NzpReport<Scalar> r;
    r.lv = pair.left.dot(v);
    r.wr = w.dot(pair.right);
    r.holds = std::abs(r.lv) > Scalar(tol::nzp) && std::abs(r.wr) > Scalar(tol::nzp);
    return r;
}

template <typename Scalar>
NzpReport<Scalar> check_nzp(const NonnegativeMatrix<Scalar>& h, const Vector<Scalar>& v, const Vector<Scalar>& w)
{
    return check_nzp(perron_pair(h), v, w);
}

template <typename Scalar>
SingularMMatrix<Scalar> to_m_matrix(const NonnegativeMatrix<Scalar>& h, Scalar rho)
{
    const Eigen::Index n = h.size();
    return {rho * Matrix<Scalar>::Identity(n, n) - h.matrix(), rho};
}

template <typename Scalar>
SingularMMatrix<Scalar> to_m_matrix(const NonnegativeMatrix<Scalar>& h)
{
    return to_m_matrix(h, spectral_radius(h).rho);
}

// adj(A) from the last Faddeev-LeVerrier term, so that it is consistent with char_poly(A).
template <typename Derived>
Matrix<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    auto fl = faddeev_leverrier(a);
    const bool odd = (a.rows() - 1) % 2 != 0;
    return odd ? Matrix<Scalar>(-fl.last_term) : fl.last_term;
}

}  // namespace perron

#endif  // PERRON_MATCORE_HPP
