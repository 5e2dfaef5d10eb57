// spin_ensemble.hpp: Pair correlators of the one-axis twisted state and
// their two-qubit X-state density matrix

#pragma once

#include "heomsq/types.hpp"

namespace heomsq::spin {

// Minimal statistics of an exchange-symmetric, parity-symmetric pair:
// sz = <s1z>, szz = <s1z s2z>, y = <s1+ s2->, u = <s1- s2->.
struct PairCorrelators {
    double sz{0.0};
    double szz{0.0};
    double y{0.0};
    cplx u{0.0, 0.0};

    double v_plus() const { return (1.0 + 2.0 * sz + szz) / 4.0; }
    double v_minus() const { return (1.0 - 2.0 * sz + szz) / 4.0; }
    double w() const { return (1.0 - szz) / 4.0; }
    // <sigma_1 . sigma_2> = 4y + szz
    double sigma_dot() const { return 4.0 * y + szz; }
};

// X-state stored in the parity-sorted basis {|00>, |11>, |01>, |10>}.
// |0> is spin up and |1> spin down, so the all-down state is |11>.
struct XStateMatrix {
    Matrix4c m{Matrix4c::Zero()};

    // The same operator in the computational (Kronecker) order {|00>, |01>, |10>, |11>}.
    Matrix4c computational() const;
    static XStateMatrix from_computational(const Matrix4c& rho);
};

// Closed-form correlators of exp(-i theta Jx^2 / 2)|down ... down> for N spins.
PairCorrelators twisted_correlators(int n_spins, double theta);

// Throws ConfigError if the correlators produce a negative eigenvalue
// beyond 1e-12 (unphysical input).
XStateMatrix correlators_to_matrix(const PairCorrelators& c);

struct CorrelatorReadout {
    PairCorrelators c;
    double y_imag{0.0};         // Im <s1+ s2->, zero under exchange symmetry
    double exchange_asym{0.0};  // |<s1z> - <s2z>|
    double leakage{0.0};        // largest cross-block entry of the X form

    static constexpr double kLeakageWarn = 1e-8;
    bool leaking() const { return leakage > kLeakageWarn; }
};

// Reads the correlators from a computational-basis density matrix.
// Throws ConfigError if rho is not Hermitian with unit trace (tol 1e-8).
CorrelatorReadout matrix_to_correlators(const Matrix4c& rho);

// Computational basis permutation: x_order[k] is the computational index of
// the k-th parity-sorted basis state.
inline constexpr int kXOrder[4] = {0, 3, 1, 2};

}  // namespace heomsq::spin
