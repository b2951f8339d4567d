#ifndef PERRON_TYPES_HPP
#define PERRON_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace perron {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Complex = std::complex<Scalar>;

// Failures caused by bad input (shape, sign, syntax). The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class UnknownSelector : public InputError {
public:
    using InputError::InputError;
};

// Failures of a numerical procedure on valid input. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotSimple : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotNonderogatory : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonsingularConstantTerm : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GenerationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Numerical thresholds shared by all modules. Relative ones are multiplied
// by the scale noted next to them at the point of use.
namespace tol {
inline constexpr double eig = 1e-9;       // x max(1, |H|_inf)
inline constexpr double cluster = 1e-8;   // x max(1, rho)
inline constexpr double nzp = 1e-10;
inline constexpr double lead = 1e-12;     // x max |coeff|
inline constexpr double rank = 1e-9;      // x largest singular value
inline constexpr double pivot = 1e-11;    // x largest entry of the parent Routh rows
inline constexpr double conj = 1e-9;
inline constexpr double root = 1e-10;     // scaled residual accepted from the root finder
inline constexpr int max_root_iter = 200;
}  // namespace tol

template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& m)
{
    if (m.size() == 0) {
        return typename Derived::Scalar(0);
    }
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace perron

#endif  // PERRON_TYPES_HPP
