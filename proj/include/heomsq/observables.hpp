// observables.hpp: Spin-squeezing parameters and pairwise concurrence

#pragma once

#include "heomsq/spin_ensemble.hpp"
#include "heomsq/types.hpp"

namespace heomsq::obs {

struct SqueezingSample {
    double t{0.0};
    double xi_ku_sq{1.0};
    double xi_t_sq{1.0};
    double varsigma_sq{1.0};
    double zeta_ku_sq{0.0};
    double zeta_t_sq{0.0};
    double concurrence{0.0};
    double c_r{0.0};  // (N - 1) * concurrence
    double sigma_dot{0.0};
    // max(|<s1x>|, |<s1y>|, |Im y|); vanishes for parity/exchange symmetric states
    double parity_err{0.0};
    spin::PairCorrelators correlators;
    double leakage{0.0};
};

// 1 + 2(N - 1)(y - |u|)
double xi_ku_squared(const spin::PairCorrelators& c, int n_spins);

// 1 + (N - 1)(szz - sz^2)
double varsigma_squared(const spin::PairCorrelators& c, int n_spins);

// min{xi_KU^2, varsigma^2} / [(1 - 1/N) <s1.s2> + 1/N]. Throws
// NumericalError when the denominator is not positive.
double xi_t_squared(const spin::PairCorrelators& c, int n_spins);

// max(0, 1 - xi_sq)
double zeta_squared(double xi_sq);

// 2 max{0, |rho_{00,11}| - sqrt(rho_{01,01} rho_{10,10}), |rho_{01,10}| - sqrt(rho_{00,00} rho_{11,11})}
double concurrence_x(const spin::XStateMatrix& rho);

// Wootters concurrence of an arbitrary two-qubit state (computational basis).
// Eigenvalues of rho down to -1e-10 are clamped to zero; more negative ones
// raise ConfigError.
double concurrence_wootters(const Matrix4c& rho);

SqueezingSample evaluate_sample(double t, const Matrix4c& rho, int n_spins);

}  // namespace heomsq::obs
