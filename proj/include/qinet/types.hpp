#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qinet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;

// Bad inputs: out-of-range parameters, mismatched dimensions.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular systems, leakage budgets, non-convergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A Fisher matrix is singular; `index` names the offending parameter when
// there is one, `direction` spans the null space.
class UnidentifiableError : public NumericalError {
public:
    UnidentifiableError(const std::string& what, int index, Vec direction)
        : NumericalError(what), index(index), direction(std::move(direction)) {}
    int index;
    Vec direction;
};

}  // namespace qinet
