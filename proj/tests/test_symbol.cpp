#include "doctest.h"
#include "tfa/rng.hpp"
#include "tfa/symbol.hpp"

#include <cmath>

using namespace tfa;

TEST_CASE("m_plus closed-form examples") {
    SymbolParams p(2.0);
    CHECK(m_plus(p, {0, 1, 1}) == doctest::Approx(1.0));
    // frozen quadrature oracle value (1e6 midpoint nodes): 0.5
    CHECK(m_plus(p, {1, 1, -2.5}) == doctest::Approx(0.5).epsilon(1e-12));
    double a = m_plus(p, {1, 0, -0.5});
    double b = m_plus(p, {-1, 0, 0.5});
    CHECK(a == doctest::Approx(0.5));
    CHECK(b == doctest::Approx(0.5));
    CHECK(a + b == doctest::Approx(1.0));
}

TEST_CASE("m_sgn examples and odd symmetry") {
    SymbolParams p(2.0);
    CHECK(m_sgn(p, {0, 1, 1}) == doctest::Approx(1.0));
    CHECK(m_sgn(p, {1, 1, -2.5}) == doctest::Approx(0.0));
    CHECK(m_sgn(p, {-1, -1, 2.5}) == doctest::Approx(0.0));
}

TEST_CASE("SymbolParams rejects beta in {0,1}") {
    CHECK_THROWS_AS(SymbolParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SymbolParams(1.0), std::invalid_argument);
    CHECK_NOTHROW(SymbolParams(2.0));
    CHECK_NOTHROW(SymbolParams(-0.5));
}

TEST_CASE("primitive_G examples") {
    CHECK(primitive_G(1, 5) == doctest::Approx(1.0));
    CHECK(primitive_G(1, -0.5) == doctest::Approx(0.5));
    CHECK(primitive_G(-1, 0.5) == doctest::Approx(-0.5));
}

TEST_CASE("primitive_G properties") {
    Rng rng(11);
    for (int t = 0; t < 2000; ++t) {
        double a = rng.uniform(-5, 5), c = rng.uniform(-5, 5);
        double g = primitive_G(a, c);
        CHECK(std::abs(g) <= std::abs(a) + 1e-15);
        if (c >= std::abs(a)) CHECK(g == doctest::Approx(a));
        if (c <= -std::abs(a)) CHECK(g == doctest::Approx(0.0));
        // continuity probe in both arguments
        double h = 1e-7;
        CHECK(std::abs(primitive_G(a + h, c) - g) <= 2 * h);
        CHECK(std::abs(primitive_G(a, c + h) - g) <= 2 * h);
        // relation to m_plus
        if (std::abs(a) > 1e-9) {
            SymbolParams p(2.0);
            double mp = m_plus(p, {a, 0.0, c});
            CHECK(g / a == doctest::Approx(mp).epsilon(1e-12));
        }
    }
}

TEST_CASE("closed form matches alpha-quadrature oracle on random samples") {
    Rng rng(7);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        double beta;
        do { beta = rng.uniform(-4, 4); } while (beta == 0.0 || beta == 1.0);
        SymbolParams p(beta);
        FrequencyTriple xi{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        double closed = m_plus(p, xi);
        double oracle = m_plus_quadrature(p, xi, 1000000);
        worst = std::max(worst, std::abs(closed - oracle));
        CHECK(closed >= 0.0);
        CHECK(closed <= 1.0);
        CHECK(m_sgn(p, xi) == doctest::Approx(2 * closed - 1).epsilon(1e-15));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("reflection symmetry away from the singular line") {
    Rng rng(3);
    for (int t = 0; t < 5000; ++t) {
        SymbolParams p(rng.uniform(1.5, 3.0));
        FrequencyTriple xi{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        FrequencyTriple mxi{-xi.xi1, -xi.xi2, -xi.xi3};
        if (xi.xi1 == 0.0 && p.beta * xi.xi2 + xi.xi3 == 0.0) continue;
        CHECK(m_plus(p, xi) + m_plus(p, mxi) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("continuity along random lines avoiding the singular line") {
    Rng rng(5);
    SymbolParams p(2.0);
    for (int t = 0; t < 200; ++t) {
        // a random segment whose xi1 stays bounded away from 0
        double s = rng.coin() ? 1.0 : -1.0;
        FrequencyTriple base{s * rng.uniform(0.5, 2.0), rng.uniform(-2, 2),
                             rng.uniform(-2, 2)};
        FrequencyTriple dir{s * rng.uniform(0, 0.1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1)};
        double prev = 0.0;
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            double u = double(i) / n;
            FrequencyTriple xi{base.xi1 + u * dir.xi1, base.xi2 + u * dir.xi2,
                               base.xi3 + u * dir.xi3};
            double v = m_plus(p, xi);
            // Lipschitz in the c-direction with constant 1/|xi1| <= 2, plus
            // the drift from xi1 itself; a generous modulus suffices here.
            if (i > 0) CHECK(std::abs(v - prev) <= 40.0 / n);
            prev = v;
        }
    }
}

TEST_CASE("bump function derivatives match finite differences") {
    BumpFn b{0.3, 1.7};
    double h = 1e-5;
    for (double x : {-1.2, -0.4, 0.0, 0.3, 0.9, 1.5}) {
        double fd1 = (b(x + h) - b(x - h)) / (2 * h);
        double fd2 = (b(x + h) - 2 * b(x) + b(x - h)) / (h * h);
        CHECK(b.d1(x) == doctest::Approx(fd1).epsilon(1e-5));
        CHECK(b.d2(x) == doctest::Approx(fd2).epsilon(1e-4));
    }
    CHECK(b(0.3) == doctest::Approx(1.0));
    CHECK(b(2.1) == 0.0);
    CHECK(b.d1(2.1) == 0.0);
}

TEST_CASE("mollifier has unit mass") {
    for (double w : {0.2, 0.05}) {
        double sum = 0.0;
        int n = 20000;
        for (int i = 0; i < n; ++i) {
            double x = -w + 2 * w * (i + 0.5) / n;
            sum += mollifier(x, w) * (2 * w / n);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

static DeltaIdentityProbe default_probe() {
    DeltaIdentityProbe pr{SymbolParams(2.0)};
    pr.xi1 = 1.0;
    pr.xi2 = 0.25;
    pr.xi3 = -0.5;
    pr.bump = BumpFn{-0.4, 3.0};
    pr.bump2 = BumpFn{0.2, 3.0};
    return pr;
}

TEST_CASE("delta identity (a): residual small and first-order in width") {
    auto pr = default_probe();
    double r1 = verify_delta_identity(DeltaIdentity::A, pr, 0.05);
    double r2 = verify_delta_identity(DeltaIdentity::A, pr, 0.025);
    CHECK(r2 <= 1e-4);
    CHECK(r2 <= r1);
}

TEST_CASE("delta identity (a) with xi1 = 0: both sides vanish") {
    auto pr = default_probe();
    pr.xi1 = 0.0;
    CHECK(verify_delta_identity(DeltaIdentity::A, pr, 0.05) <= 1e-12);
}

TEST_CASE("all six identities converge under width halving") {
    auto pr = default_probe();
    for (auto id : {DeltaIdentity::A, DeltaIdentity::B, DeltaIdentity::C,
                    DeltaIdentity::D, DeltaIdentity::E, DeltaIdentity::F}) {
        double prev = verify_delta_identity(id, pr, 0.2);
        for (double w : {0.1, 0.05, 0.025}) {
            double r = verify_delta_identity(id, pr, w);
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
        CHECK(prev <= 1e-4);
    }
}

TEST_CASE("identity (d) equals beta^2 times identity (a) pairing") {
    // Both use the same single-variable bump; the (d) residual and the (a)
    // residual relate through the beta^2 prefactor and variable substitution.
    // Check at the level of identity values: residuals individually small.
    auto pr = default_probe();
    double ra = verify_delta_identity(DeltaIdentity::A, pr, 0.025);
    double rd = verify_delta_identity(DeltaIdentity::D, pr, 0.025);
    CHECK(ra <= 1e-4);
    CHECK(rd <= 1e-4);
}

TEST_CASE("verify_delta_identity rejects bad width") {
    auto pr = default_probe();
    CHECK_THROWS_AS(verify_delta_identity(DeltaIdentity::A, pr, 0.0),
                    std::invalid_argument);
}
