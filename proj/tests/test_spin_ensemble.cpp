#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heomsq/spin_ensemble.hpp"

using namespace heomsq;
using namespace heomsq::spin;

namespace {

// N = 10, theta = pi/10, from the closed forms at 30 digits.
constexpr double kSz = -0.894497937625867644;
constexpr double kSzz = 0.834672947570785378;
constexpr double kY = 0.0413317631073036555;
constexpr double kUim = -0.0708372776111625109;
constexpr double kVplus = 0.0114192680797625226;
constexpr double kVminus = 0.905917205705630166;

PairCorrelators random_physical(std::mt19937_64& rng) {
    // Random point of the X-state polytope parameterised by eigen-weights.
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (;;) {
        PairCorrelators c;
        c.sz = 2.0 * u01(rng) - 1.0;
        c.szz = 2.0 * u01(rng) - 1.0;
        const double w = c.w(), vp = c.v_plus(), vm = c.v_minus();
        if (vp < 0 || vm < 0 || w < 0) continue;
        c.y = (2.0 * u01(rng) - 1.0) * w;
        const double r = std::sqrt(vp * vm) * u01(rng);
        const double phi = 2.0 * std::numbers::pi * u01(rng);
        c.u = std::polar(r, phi);
        return c;
    }
}

}  // namespace

TEST_SUITE("spin_ensemble") {

TEST_CASE("twisted correlators at theta = 0 are the all-down product") {
    for (int n : {2, 3, 10, 500}) {
        const auto c = twisted_correlators(n, 0.0);
        CHECK(c.sz == -1.0);
        CHECK(c.szz == 1.0);
        CHECK(c.y == 0.0);
        CHECK(std::abs(c.u) == 0.0);
        const auto m = correlators_to_matrix(c);
        CHECK(std::abs(m.m(1, 1) - 1.0) < 1e-15);
        CHECK(m.m.norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("twisted correlators N = 10, theta = pi/10") {
    const auto c = twisted_correlators(10, std::numbers::pi / 10);
    CHECK(c.sz == doctest::Approx(kSz).epsilon(1e-14));
    CHECK(c.szz == doctest::Approx(kSzz).epsilon(1e-14));
    CHECK(c.y == doctest::Approx(kY).epsilon(1e-13));
    CHECK(c.u.real() == doctest::Approx(-kY).epsilon(1e-13));
    CHECK(c.u.imag() == doctest::Approx(kUim).epsilon(1e-13));
    CHECK(c.v_plus() == doctest::Approx(kVplus).epsilon(1e-12));
    CHECK(c.v_minus() == doctest::Approx(kVminus).epsilon(1e-14));
    CHECK(c.w() == doctest::Approx(kY).epsilon(1e-13));
}

TEST_CASE("theta = 2 pi periodicity") {
    for (int n : {2, 4, 6, 12}) {
        const auto c = twisted_correlators(n, 2.0 * std::numbers::pi);
        CHECK(c.szz == doctest::Approx(1.0));
        CHECK(std::abs(c.y) < 1e-15);
    }
}

TEST_CASE("large N does not underflow") {
    const auto c = twisted_correlators(400, 0.05);
    CHECK(std::isfinite(c.sz));
    CHECK(c.sz < 0.0);
    CHECK(c.sz == doctest::Approx(-std::pow(std::cos(0.025), 399)).epsilon(1e-12));
    const auto far = twisted_correlators(400, 2.5);  // cos(theta) < 0
    CHECK(std::isfinite(far.szz));
    CHECK(far.szz == doctest::Approx((1.0 + std::pow(std::cos(2.5), 398)) / 2.0).epsilon(1e-12));
}

TEST_CASE("symmetric sector identity") {
    for (int n = 2; n <= 40; n += 3)
        for (int k = 0; k < 20; ++k) {
            const auto c = twisted_correlators(n, 0.3 * k);
            CHECK(std::abs(c.sigma_dot() - 1.0) < 1e-10);
            const auto m = correlators_to_matrix(c);
            CHECK(m.m.trace().real() == doctest::Approx(1.0).epsilon(1e-15));
        }
}

TEST_CASE("matrix layout and computational basis") {
    const auto c = twisted_correlators(10, std::numbers::pi / 10);
    const auto x = correlators_to_matrix(c);
    CHECK(x.m(0, 0).real() == doctest::Approx(c.v_plus()));
    CHECK(x.m(1, 1).real() == doctest::Approx(c.v_minus()));
    CHECK(x.m(2, 2).real() == doctest::Approx(c.w()));
    CHECK(x.m(3, 3).real() == doctest::Approx(c.w()));
    CHECK(x.m(2, 3).real() == doctest::Approx(c.y));
    CHECK(std::abs(x.m(0, 1) - c.u) < 1e-15);
    CHECK(std::abs(x.m(1, 0) - std::conj(c.u)) < 1e-15);
    for (int i : {0, 1})
        for (int j : {2, 3}) {
            CHECK(x.m(i, j) == cplx(0.0));
            CHECK(x.m(j, i) == cplx(0.0));
        }
    // <s1- s2-> = Tr[rho s1- s2-] in the Kronecker basis.
    const Matrix4c rho = x.computational();
    const cplx u = (rho * pauli::kron(pauli::minus(), pauli::minus())).trace();
    CHECK(std::abs(u - c.u) < 1e-15);
    const cplx y = (rho * pauli::kron(pauli::plus(), pauli::minus())).trace();
    CHECK(std::abs(y - c.y) < 1e-15);
    CHECK(((rho * pauli::kron(pauli::z(), pauli::id())).trace().real()) == doctest::Approx(c.sz));
    CHECK(XStateMatrix::from_computational(rho).m == x.m);
}

TEST_CASE("Bell state") {
    PairCorrelators c;
    c.sz = 0.0;
    c.szz = 1.0;
    c.y = 0.0;
    c.u = 0.5;
    const Matrix4c rho = correlators_to_matrix(c).computational();
    Eigen::Vector4cd phi(1.0, 0.0, 0.0, 1.0);
    phi /= std::sqrt(2.0);
    CHECK((rho - phi * phi.adjoint()).norm() < 1e-15);
}

TEST_CASE("unphysical correlators are rejected") {
    PairCorrelators c;
    c.sz = 0.0;
    c.szz = 0.0;
    c.y = 0.3;  // w = 1/4 < y
    CHECK_THROWS_AS(correlators_to_matrix(c), ConfigError);
    c.y = 0.0;
    c.u = 0.3;  // |u| > sqrt(v+ v-) = 1/4
    CHECK_THROWS_AS(correlators_to_matrix(c), ConfigError);
    c.sz = 0.9;
    c.u = 0.0;
    c.szz = 0.0;  // v- < 0
    CHECK_THROWS_AS(correlators_to_matrix(c), ConfigError);
}

TEST_CASE("round trip") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        const auto c = random_physical(rng);
        const auto r = matrix_to_correlators(correlators_to_matrix(c).computational());
        CHECK(std::abs(r.c.sz - c.sz) < 1e-15);
        CHECK(std::abs(r.c.szz - c.szz) < 1e-15);
        CHECK(std::abs(r.c.y - c.y) < 1e-15);
        CHECK(std::abs(r.c.u - c.u) < 1e-15);
        CHECK(r.leakage == 0.0);
        CHECK(r.y_imag == 0.0);
    }
}

TEST_CASE("readout of the maximally mixed state and leakage") {
    const Matrix4c mixed = Matrix4c::Identity() / 4.0;
    const auto r = matrix_to_correlators(mixed);
    CHECK(r.c.sz == 0.0);
    CHECK(r.c.szz == 0.0);
    CHECK(r.c.y == 0.0);
    CHECK(std::abs(r.c.u) == 0.0);
    CHECK_FALSE(r.leaking());

    Matrix4c leaky = mixed;
    leaky(0, 1) = leaky(1, 0) = 1e-6;  // |00><01|: crosses the parity blocks
    const auto l = matrix_to_correlators(leaky);
    CHECK(l.leaking());
    CHECK(l.leakage == doctest::Approx(1e-6));

    CHECK_THROWS_AS(matrix_to_correlators(mixed * 2.0), ConfigError);
    Matrix4c nonherm = mixed;
    nonherm(0, 3) = 0.1;
    CHECK_THROWS_AS(matrix_to_correlators(nonherm), ConfigError);
}

TEST_CASE("exchange asymmetry is reported") {
    const Matrix4c rho = pauli::kron(Matrix2c((Eigen::Matrix2cd() << 1, 0, 0, 0).finished()),
                                     Matrix2c((Eigen::Matrix2cd() << 0, 0, 0, 1).finished()));
    const auto r = matrix_to_correlators(rho);
    CHECK(r.exchange_asym == doctest::Approx(2.0));
}

}  // TEST_SUITE
