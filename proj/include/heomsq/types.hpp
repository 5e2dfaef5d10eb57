// types.hpp: Shared scalar/matrix aliases and Pauli operators

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace heomsq {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Raised for inputs that violate a documented precondition (bad parameters,
// unphysical density matrices). The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a computed quantity leaves its domain of validity at run time
// (non-finite ADOs, step-error ceiling exceeded, vanishing denominators).
// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace pauli {

// Computational basis: |0> = spin up (sigma_z = +1), |1> = spin down.
inline Matrix2c x() { Matrix2c m; m << 0, 1, 1, 0; return m; }
inline Matrix2c y() { Matrix2c m; m << 0, -I_UNIT, I_UNIT, 0; return m; }
inline Matrix2c z() { Matrix2c m; m << 1, 0, 0, -1; return m; }
inline Matrix2c id() { return Matrix2c::Identity(); }
// sigma_+ = |up><down| = |0><1|, sigma_- = |1><0|
inline Matrix2c plus() { Matrix2c m; m << 0, 1, 0, 0; return m; }
inline Matrix2c minus() { Matrix2c m; m << 0, 0, 1, 0; return m; }

inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
    Matrix4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

}  // namespace pauli

}  // namespace heomsq
