// spin_ensemble.cpp

#include "heomsq/spin_ensemble.hpp"

#include <cmath>
#include <sstream>

namespace heomsq::spin {

namespace {

// c^n for integer n >= 0 without intermediate underflow in the pairwise
// products: exp(n log|c|) with the sign restored for odd powers of c < 0.
double signed_power(double c, int n) {
    if (n == 0) return 1.0;
    if (c == 0.0) return 0.0;
    const double mag = std::exp(n * std::log(std::abs(c)));
    return (c < 0.0 && (n % 2 != 0)) ? -mag : mag;
}

}  // namespace

Matrix4c XStateMatrix::computational() const {
    Matrix4c out;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out(kXOrder[a], kXOrder[b]) = m(a, b);
    return out;
}

XStateMatrix XStateMatrix::from_computational(const Matrix4c& rho) {
    XStateMatrix x;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) x.m(a, b) = rho(kXOrder[a], kXOrder[b]);
    return x;
}

PairCorrelators twisted_correlators(int n_spins, double theta) {
    if (n_spins < 2) throw ConfigError("spin: N must be >= 2");
    const double cos_theta_pow = signed_power(std::cos(theta), n_spins - 2);
    const double half_cos = std::cos(theta / 2.0);

    PairCorrelators c;
    c.sz = -signed_power(half_cos, n_spins - 1);
    c.szz = 0.5 * (1.0 + cos_theta_pow);
    c.y = (1.0 - cos_theta_pow) / 8.0;
    c.u = cplx(-(1.0 - cos_theta_pow) / 8.0,
               -0.5 * std::sin(theta / 2.0) * signed_power(half_cos, n_spins - 2));
    return c;
}

XStateMatrix correlators_to_matrix(const PairCorrelators& c) {
    constexpr double tol = 1e-12;
    const double vp = c.v_plus();
    const double vm = c.v_minus();
    const double w = c.w();

    // Eigenvalues of [[vp, u], [u*, vm]] and [[w, y], [y, w]].
    const double mean = 0.5 * (vp + vm);
    const double radius = std::hypot(0.5 * (vp - vm), std::abs(c.u));
    const double lowest = std::min(mean - radius, w - std::abs(c.y));
    if (!(lowest >= -tol)) {
        std::ostringstream msg;
        msg << "spin: correlators (sz=" << c.sz << ", szz=" << c.szz << ", y=" << c.y
            << ", u=" << c.u << ") give a negative eigenvalue " << lowest;
        throw ConfigError(msg.str());
    }

    // <00|rho|11> = Tr(rho |11><00|) = <s1- s2->.
    XStateMatrix x;
    x.m(0, 0) = vp;
    x.m(1, 1) = vm;
    x.m(0, 1) = c.u;
    x.m(1, 0) = std::conj(c.u);
    x.m(2, 2) = w;
    x.m(3, 3) = w;
    x.m(2, 3) = c.y;
    x.m(3, 2) = c.y;
    return x;
}

CorrelatorReadout matrix_to_correlators(const Matrix4c& rho) {
    constexpr double tol = 1e-8;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw ConfigError("spin: density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tol)
        throw ConfigError("spin: density matrix does not have unit trace");

    const Matrix4c sz1 = pauli::kron(pauli::z(), pauli::id());
    const Matrix4c sz2 = pauli::kron(pauli::id(), pauli::z());
    const Matrix4c szz = pauli::kron(pauli::z(), pauli::z());

    CorrelatorReadout r;
    r.c.sz = (rho * sz1).trace().real();
    r.c.szz = (rho * szz).trace().real();
    r.exchange_asym = std::abs(r.c.sz - (rho * sz2).trace().real());

    // <s1+ s2-> = Tr(rho |01><10|) = <10|rho|01>; symmetrized with the
    // conjugate entry so that a slightly non-Hermitian rho reads consistently.
    const cplx y = 0.5 * (rho(2, 1) + std::conj(rho(1, 2)));
    r.c.y = y.real();
    r.y_imag = std::abs(y.imag());

    // <s1- s2-> = Tr(rho |11><00|) = <00|rho|11>
    r.c.u = 0.5 * (rho(0, 3) + std::conj(rho(3, 0)));

    const XStateMatrix x = XStateMatrix::from_computational(rho);
    double leak = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 2; b < 4; ++b)
            leak = std::max({leak, std::abs(x.m(a, b)), std::abs(x.m(b, a))});
    r.leakage = leak;
    return r;
}

}  // namespace heomsq::spin
