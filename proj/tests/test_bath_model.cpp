#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "heomsq/bath_model.hpp"

using namespace heomsq;
using namespace heomsq::bath;

namespace {

// Values below were evaluated independently at 30 significant digits.
constexpr double kC0Real = 0.0145472766469462238;
constexpr double kDelta0 = 0.00301815568702517459;
constexpr double kC1 = 0.00289115313081157317;
constexpr double kC2 = 0.00143566741707238454;
constexpr double kDelta2 = 0.000720603306882003295;

const BathSpectrum kDefaultBath{0.03, 0.15, 4.0};

}  // namespace

TEST_SUITE("bath_model") {

TEST_CASE("spectral density peak and zero") {
    CHECK(spectral_density(0.0, kDefaultBath) == 0.0);
    CHECK(spectral_density(kDefaultBath.gamma, kDefaultBath) == doctest::Approx(kDefaultBath.lambda / std::numbers::pi).epsilon(1e-14));
    CHECK(spectral_density(-kDefaultBath.gamma, kDefaultBath) == doctest::Approx(-0.0095492965855137).epsilon(1e-12));
}

TEST_CASE("spectral density is odd") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(-50.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        const double x = w(rng);
        CHECK(spectral_density(-x, kDefaultBath) == -spectral_density(x, kDefaultBath));
    }
}

TEST_CASE("expansion at M = 0") {
    const auto e = build_expansion(kDefaultBath, 0);
    REQUIRE(e.nu.size() == 1);
    CHECK(e.nu[0] == kDefaultBath.gamma);
    CHECK(e.c[0].real() == doctest::Approx(kC0Real).epsilon(1e-13));
    CHECK(e.c[0].imag() == doctest::Approx(-0.0045).epsilon(1e-14));
    CHECK(e.delta.real() == doctest::Approx(kDelta0).epsilon(1e-12));
    CHECK(e.delta.imag() == 0.0);
}

TEST_CASE("expansion at M = 2") {
    const auto e = build_expansion(kDefaultBath, 2);
    CHECK(e.nu[1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(e.nu[2] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(e.c[1].real() == doctest::Approx(kC1).epsilon(1e-13));
    CHECK(e.c[1].imag() == 0.0);
    CHECK(e.c[2].real() == doctest::Approx(kC2).epsilon(1e-13));
    CHECK(e.delta.real() == doctest::Approx(kDelta2).epsilon(1e-11));
}

TEST_CASE("frequencies strictly increase") {
    const auto e = build_expansion({0.1, 0.2, 1.0}, 20);
    for (int k = 1; k <= 20; ++k) CHECK(e.nu[k] > e.nu[k - 1]);
}

TEST_CASE("terminator is real for random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(0.001, 0.5), gam(0.01, 2.0), beta(0.1, 10.0);
    std::uniform_int_distribution<int> m(0, 30);
    for (int i = 0; i < 200; ++i) {
        const BathSpectrum s{lam(rng), gam(rng), beta(rng)};
        if (std::abs(s.beta * s.gamma / (2 * std::numbers::pi) - std::round(s.beta * s.gamma / (2 * std::numbers::pi))) < 1e-6)
            continue;
        const auto e = build_expansion(s, m(rng));
        CHECK(std::abs(e.delta.imag()) <= 4.0 * std::numeric_limits<double>::epsilon() * s.lambda);
    }
}

TEST_CASE("terminator decreases monotonically to zero") {
    for (const BathSpectrum& s : {kDefaultBath, BathSpectrum{0.03, 0.15, 1.0}, BathSpectrum{0.2, 1.0, 2.0}}) {
        double prev = build_expansion(s, 0).delta.real();
        CHECK(prev >= 0.0);
        for (int m = 1; m <= 50; ++m) {
            const double d = build_expansion(s, m).delta.real();
            CHECK(d <= prev);
            CHECK(d >= 0.0);
            prev = d;
        }
        // Tail of sum (4 lambda gamma / beta) / nu_k^2 ~ lambda gamma beta / (pi^2 M)
        CHECK(prev < s.lambda * s.gamma * s.beta / (std::numbers::pi * std::numbers::pi * 50) * 1.05);
    }
}

TEST_CASE("cot pole is rejected") {
    const double beta = 2.0 * std::numbers::pi / 0.15;
    CHECK_THROWS_AS(build_expansion({0.03, 0.15, beta}, 2), ConfigError);
    CHECK_THROWS_AS(build_expansion({0.03, 0.15, 2.0 * beta}, 0), ConfigError);
    CHECK_NOTHROW(build_expansion({0.03, 0.15, beta * 1.01}, 2));
}

TEST_CASE("invalid spectra are rejected") {
    CHECK_THROWS_AS(build_expansion({-0.1, 0.15, 4.0}, 1), ConfigError);
    CHECK_THROWS_AS(build_expansion({0.03, 0.0, 4.0}, 1), ConfigError);
    CHECK_THROWS_AS(build_expansion({0.03, 0.15, -1.0}, 1), ConfigError);
    CHECK_THROWS_AS(build_expansion(kDefaultBath, -1), ConfigError);
}

TEST_CASE("correlation function") {
    const auto e0 = build_expansion(kDefaultBath, 0);
    const cplx c = correlation_function(0.0, e0);
    CHECK(c.real() == doctest::Approx(kC0Real).epsilon(1e-13));
    CHECK(c.imag() == doctest::Approx(-0.0045).epsilon(1e-14));
    CHECK(std::abs(correlation_function(500.0, build_expansion(kDefaultBath, 3))) < 1e-30);

    const auto free = build_expansion({0.0, 0.15, 4.0}, 3);
    for (double t : {0.0, 0.5, 3.0}) CHECK(std::abs(correlation_function(t, free)) == 0.0);
}

TEST_CASE("Matsubara series converges at high temperature") {
    // Near t = 0 the tail only falls off like 1/M; the check applies once
    // nu_41 t is large.
    for (double beta : {0.5, 1.0, 1.0 / 0.15}) {
        const BathSpectrum s{0.03, 0.15, beta};
        const auto e40 = build_expansion(s, 40);
        const auto e60 = build_expansion(s, 60);
        for (double t : {0.5, 1.0, 5.0})
            CHECK(std::abs(correlation_function(t, e40) - correlation_function(t, e60)) < 1e-8);
    }
}

}  // TEST_SUITE
