// bath_model.cpp

#include "heomsq/bath_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace heomsq::bath {

namespace {

// Relative distance below which beta*gamma/(2 pi) counts as an integer.
constexpr double kResonanceTol = 1e-8;

}  // namespace

void BathSpectrum::validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ConfigError("bath: lambda must be finite and >= 0");
    if (!std::isfinite(gamma) || gamma <= 0.0)
        throw ConfigError("bath: gamma must be finite and > 0");
    if (!std::isfinite(beta) || beta <= 0.0)
        throw ConfigError("bath: beta must be finite and > 0");
}

double spectral_density(double omega, const BathSpectrum& spec) {
    return 2.0 / std::numbers::pi * omega * spec.lambda * spec.gamma /
           (omega * omega + spec.gamma * spec.gamma);
}

MatsubaraExpansion build_expansion(const BathSpectrum& spec, int terms) {
    spec.validate();
    if (terms < 0) throw ConfigError("bath: Matsubara cutoff M must be >= 0");

    const double lambda = spec.lambda;
    const double gamma = spec.gamma;
    const double beta = spec.beta;

    // cot(beta gamma / 2) has poles exactly where some nu_k = 2 pi k / beta equals gamma.
    const double ratio = beta * gamma / (2.0 * std::numbers::pi);
    const double nearest = std::round(ratio);
    if (nearest >= 1.0 && std::abs(ratio - nearest) <= kResonanceTol * nearest) {
        std::ostringstream msg;
        msg << "bath: beta*gamma = " << beta * gamma << " is a pole of cot(beta*gamma/2); "
            << "Matsubara frequency nu_" << static_cast<long>(nearest)
            << " coincides with gamma. Choose a different beta or gamma.";
        throw ConfigError(msg.str());
    }

    MatsubaraExpansion exp;
    exp.terms = terms;
    exp.nu.resize(terms + 1);
    exp.c.resize(terms + 1);

    exp.nu[0] = gamma;
    exp.c[0] = lambda * gamma * cplx(1.0 / std::tan(beta * gamma / 2.0), -1.0);
    for (int k = 1; k <= terms; ++k) {
        const double nu = 2.0 * std::numbers::pi * k / beta;
        exp.nu[k] = nu;
        exp.c[k] = 4.0 * lambda * gamma / beta * nu / (nu * nu - gamma * gamma);
    }

    // The imaginary parts cancel analytically: Im(c_0)/nu_0 = -lambda.
    // Evaluate the real part on its own so Im(delta) is exactly zero.
    double re = 2.0 * lambda / (beta * gamma);
    for (int k = 0; k <= terms; ++k) re -= exp.c[k].real() / exp.nu[k];
    const double im = -lambda - exp.c[0].imag() / exp.nu[0];
    exp.delta = cplx(re, im);
    return exp;
}

double MatsubaraExpansion::max_frequency() const {
    double m = 0.0;
    for (double v : nu) m = std::max(m, v);
    return m;
}

cplx correlation_function(double t, const MatsubaraExpansion& exp) {
    cplx sum{0.0, 0.0};
    for (int k = 0; k <= exp.terms; ++k) sum += exp.c[k] * std::exp(-exp.nu[k] * t);
    return sum;
}

}  // namespace heomsq::bath
