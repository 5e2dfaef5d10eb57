// bath_model.hpp: Drude-Lorentz spectral density and its Matsubara expansion

#pragma once

#include <vector>

#include "heomsq/types.hpp"

namespace heomsq::bath {

// All quantities in units of the qubit frequency (omega0 = hbar = k_B = 1).
struct BathSpectrum {
    double lambda{0.03};  // system-bath coupling strength
    double gamma{0.15};   // spectral width
    double beta{4.0};     // inverse temperature

    // lambda = 0 is accepted (free evolution); gamma and beta must be > 0.
    void validate() const;
};

// C(t) = sum_{k=0}^{M} c_k exp(-nu_k t), plus the terminator coefficient
// delta = 2 lambda/(beta gamma) - i lambda - sum_k c_k/nu_k that accounts
// for the dropped Matsubara tail.
struct MatsubaraExpansion {
    int terms{0};  // M
    std::vector<double> nu;
    std::vector<cplx> c;
    cplx delta{0.0, 0.0};

    double max_frequency() const;
};

// J(w) = (2/pi) w lambda gamma / (w^2 + gamma^2)
double spectral_density(double omega, const BathSpectrum& spec);

// Throws ConfigError when beta*gamma hits a cot pole (nu_k == gamma for some k >= 1).
MatsubaraExpansion build_expansion(const BathSpectrum& spec, int terms);

cplx correlation_function(double t, const MatsubaraExpansion& exp);

}  // namespace heomsq::bath
