#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace blindchan {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Sizes of operands do not agree with the configuration.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of the operation (rho > 1, zero-norm reference, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Eigensolver or other numeric failure.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

}  // namespace blindchan
