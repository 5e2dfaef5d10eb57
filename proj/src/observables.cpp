// observables.cpp

#include "heomsq/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

namespace heomsq::obs {

double xi_ku_squared(const spin::PairCorrelators& c, int n_spins) {
    return 1.0 + 2.0 * (n_spins - 1) * (c.y - std::abs(c.u));
}

double varsigma_squared(const spin::PairCorrelators& c, int n_spins) {
    return 1.0 + (n_spins - 1) * (c.szz - c.sz * c.sz);
}

double xi_t_squared(const spin::PairCorrelators& c, int n_spins) {
    const double inv_n = 1.0 / n_spins;
    const double denom = (1.0 - inv_n) * c.sigma_dot() + inv_n;
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "observables: xi_T^2 denominator " << denom
            << " is not positive; the reduced formula does not apply to this state";
        throw NumericalError(msg.str());
    }
    return std::min(xi_ku_squared(c, n_spins), varsigma_squared(c, n_spins)) / denom;
}

double zeta_squared(double xi_sq) { return std::max(0.0, 1.0 - xi_sq); }

double concurrence_x(const spin::XStateMatrix& rho) {
    const auto& m = rho.m;
    const double vp = std::max(0.0, m(0, 0).real());
    const double vm = std::max(0.0, m(1, 1).real());
    const double w1 = std::max(0.0, m(2, 2).real());
    const double w2 = std::max(0.0, m(3, 3).real());
    const double u = std::abs(m(0, 1));
    const double y = std::abs(m(2, 3));
    return 2.0 * std::max({0.0, u - std::sqrt(w1 * w2), y - std::sqrt(vp * vm)});
}

double concurrence_wootters(const Matrix4c& rho) {
    constexpr double clamp_tol = 1e-10;
    const Matrix4c yy = pauli::kron(pauli::y(), pauli::y());

    // With rho = W W^dag, the square roots of the eigenvalues of rho * rho~
    // are the singular values of tau = W^T (sy x sy) W. Reading them off an
    // SVD avoids square roots of roundoff-level eigenvalues for rank-deficient
    // states.
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (rho + rho.adjoint()));
    Eigen::Vector4d weight = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        if (weight(i) < -clamp_tol) {
            std::ostringstream msg;
            msg << "observables: density matrix has eigenvalue " << weight(i);
            throw ConfigError(msg.str());
        }
        weight(i) = std::sqrt(std::max(0.0, weight(i)));
    }
    const Matrix4c w = es.eigenvectors() * weight.asDiagonal();
    const Matrix4c tau = w.transpose() * yy * w;
    Eigen::JacobiSVD<Matrix4c> svd(tau);

    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[i] = svd.singularValues()(i);
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

SqueezingSample evaluate_sample(double t, const Matrix4c& rho, int n_spins) {
    if (n_spins < 2) throw ConfigError("observables: N must be >= 2");
    const spin::CorrelatorReadout r = spin::matrix_to_correlators(rho);

    SqueezingSample s;
    s.t = t;
    s.correlators = r.c;
    s.leakage = r.leakage;
    s.xi_ku_sq = xi_ku_squared(r.c, n_spins);
    s.varsigma_sq = varsigma_squared(r.c, n_spins);
    s.xi_t_sq = xi_t_squared(r.c, n_spins);
    s.zeta_ku_sq = zeta_squared(s.xi_ku_sq);
    s.zeta_t_sq = zeta_squared(s.xi_t_sq);
    s.concurrence = concurrence_x(spin::XStateMatrix::from_computational(rho));
    s.c_r = (n_spins - 1) * s.concurrence;
    s.sigma_dot = r.c.sigma_dot();

    const Matrix4c sx1 = pauli::kron(pauli::x(), pauli::id());
    const Matrix4c sy1 = pauli::kron(pauli::y(), pauli::id());
    s.parity_err = std::max({std::abs((rho * sx1).trace()), std::abs((rho * sy1).trace()), r.y_imag});
    return s;
}

}  // namespace heomsq::obs
