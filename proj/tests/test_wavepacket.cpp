#include <cmath>

#include "doctest.h"
#include "tfa/quadrature.hpp"
#include "tfa/rng.hpp"
#include "tfa/wavepacket.hpp"

using namespace tfa;

namespace {

Tile make_tile(int freq_scale, long long kt, long long kf, int sf = 0) {
    return Tile{MeshInterval{-freq_scale, kt, 0}, MeshInterval{freq_scale, kf, sf}};
}

double mother_l2() {
    BumpProfile b;
    auto f = [&](double xi) { return b.fourier(xi) * b.fourier(xi); };
    return std::sqrt(2.0 * integrate(f, 0.0, b.width, {}, 64));
}

double packet_l2(const WavePacket& phi, double span = 80, int panels = 400) {
    auto f = [&](double x) { return std::norm(phi(x)); };
    double half = span * phi.scale / 2;
    return std::sqrt(integrate(f, phi.x0 - half, phi.x0 + half, {}, panels));
}

} // namespace

TEST_CASE("approximate cutoff values") {
    RatInterval I{2, 3};
    CHECK(chi_tilde(I, 2.5) == doctest::Approx(1.0));
    CHECK(chi_tilde(I, 3.5) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(chi_tilde(I, 2.5 + 3.0) == doctest::Approx(1.0 / std::sqrt(10.0)));
    CHECK(chi_tilde(I, 2.5 - 3.0) == doctest::Approx(1.0 / std::sqrt(10.0)));
    CHECK_THROWS_AS(chi_tilde(RatInterval{1, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("mother profile support and decay") {
    BumpProfile b;
    CHECK(b.fourier(0.0) == doctest::Approx(1.0));
    CHECK(b.fourier(b.width) == 0.0);
    CHECK(b.fourier(-b.width) == 0.0);
    CHECK(b.fourier(0.45) == 0.0);
    CHECK(b.spatial(0.0) > 0.0);
    CHECK(b.spatial(2.0) == doctest::Approx(b.spatial(-2.0)));

    // superpolynomial spatial decay: the polynomial-decay constants
    // C_M = sup |eta(x)| (1+|x|)^M stay finite for M up to 10
    // the competition between e^{-c sqrt(x)} decay and (1+x)^M peaks near
    // x = (2M/c)^2, so the window has to reach a few hundred for M = 10
    for (int M = 2; M <= 10; M += 2) {
        double c_m = 0.0;
        for (double x = 0.0; x <= 400.0; x += 0.5)
            c_m = std::max(c_m, std::abs(b.spatial(x)) * std::pow(1.0 + x, M));
        CHECK(std::isfinite(c_m));
        CHECK(c_m > 0.0);
        MESSAGE("decay constant C_", M, " = ", c_m);
        // beyond M = 6 the far tail sits under the quadrature noise floor
        // (~1e-16), so the amplified comparison is only meaningful below that
        if (M <= 6) {
            double tail = std::abs(b.spatial(800.0)) * std::pow(801.0, M);
            CHECK(tail < c_m);
        }
    }
}

TEST_CASE("packet normalization and frequency support") {
    WavePacket phi = make_wave_packet(make_tile(0, 0, 5), 2.0, 0);
    CHECK(packet_l2(phi) == doctest::Approx(mother_l2()).epsilon(1e-8));

    // spectrum confined to (9/10) omega: omega = [5,6), support (5.1, 5.9)
    CHECK(phi.fourier(5.05).real() == 0.0);
    CHECK(phi.fourier(5.95).real() == 0.0);
    CHECK(std::abs(phi.fourier(5.5)) > 0.0);
    RatInterval nine = phi.tile.omega().dilate(Rat(9, 10));
    auto mass = [&](double a, double b2) {
        return integrate([&](double xi) { return std::norm(phi.fourier(xi)); }, a, b2,
                         {}, 64);
    };
    double inside = mass(to_double(nine.lo), to_double(nine.hi));
    double outside = mass(3.0, to_double(nine.lo)) + mass(to_double(nine.hi), 8.0);
    CHECK(outside <= 1e-10 * inside);

    // L2 normalization constant is tile independent
    for (int k = -2; k <= 3; ++k) {
        WavePacket q = make_wave_packet(make_tile(k, 1, 3), 2.0, 0);
        CHECK(packet_l2(q) == doctest::Approx(packet_l2(phi)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(make_wave_packet(make_tile(0, 0, 0), 0.5, 0), std::invalid_argument);
}

TEST_CASE("packet dilation covariance and time shift") {
    for (double p : {1.0, 2.0, 4.0}) {
        WavePacket a = make_wave_packet(make_tile(0, 0, 2), p, 0);
        WavePacket b = make_wave_packet(make_tile(-1, 0, 1), p, 0);  // I doubled
        for (double t = -3.0; t <= 3.0; t += 0.37) {
            double va = std::abs(a(a.x0 + t));
            double vb = std::abs(b(b.x0 + 2 * t));
            CHECK(vb == doctest::Approx(std::pow(2.0, -1.0 / p) * va).epsilon(1e-12));
        }
    }

    // n = 4: envelope peak sits 4 |I| past the interval center
    WavePacket s = make_wave_packet(make_tile(1, 0, 0), 2.0, 4);
    double best_x = 0, best_v = -1;
    for (double x = -2.0; x <= 6.0; x += 1e-3) {
        double v = std::abs(s(x));
        if (v > best_v) { best_v = v; best_x = x; }
    }
    CHECK(best_x == doctest::Approx(0.25 + 4 * 0.5).epsilon(1e-6));
}

TEST_CASE("inner products") {
    WavePacket phi = make_wave_packet(make_tile(0, 31, 5), 2.0, 0);

    SUBCASE("disjoint frequency bands vanish exactly") {
        BandlimitedFn f;
        f.period = 1.0;
        f.set(0, {1.0, 0.0});
        f.set(1, {0.3, -0.2});
        f.set(-1, {0.1, 0.4});  // modes at 0, +-1; packet band is (5.1, 5.9)
        Cplx ip = inner_product(f, phi);
        CHECK(std::abs(ip) == 0.0);
    }

    SUBCASE("self inner product is the squared norm") {
        SampledFunction samples;
        samples.period = 64.0;
        std::size_t n = 4096;
        for (std::size_t i = 0; i < n; ++i)
            samples.values.push_back(phi(64.0 * double(i) / double(n)));
        Cplx ip = inner_product(samples, phi);
        CHECK(ip.imag() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(ip.real() == doctest::Approx(mother_l2() * mother_l2()).epsilon(1e-6));
    }

    SUBCASE("grid quadrature against refined-grid oracle") {
        // random modes inside the packet's band (5.1, 5.9), so the pairing is
        // of unit size rather than vacuously zero
        Rng rng(71);
        BandlimitedFn f;
        f.period = 64.0;
        for (int k : {332, 340, 349, 356, 361, 370}) {
            double a = rng.uniform(0.0, 2.0 * M_PI), r = rng.uniform(0.2, 1.0);
            f.set(k, Cplx(r * std::cos(a), r * std::sin(a)));
        }
        auto grid_ip = [&](std::size_t n) {
            SampledFunction s;
            s.period = 64.0;
            for (std::size_t i = 0; i < n; ++i)
                s.values.push_back(f.eval(64.0 * double(i) / double(n)));
            return inner_product(s, phi);
        };
        Cplx coarse = grid_ip(1024), fine = grid_ip(4096);
        CHECK(std::abs(coarse - fine) <= 1e-6 * std::abs(fine));
        // the band-limited path integrates the same pairing in closed form
        Cplx exact = inner_product(f, phi);
        CHECK(std::abs(exact - fine) <= 1e-5 * std::max(1.0, std::abs(fine)));
    }
}

TEST_CASE("coefficient arrays match single calls") {
    CHECK(coefficient_array({}, {}, 1, 0).empty());

    Rng rng(72);
    BandlimitedFn f = random_bandlimited(rng, 24, 1.0, false);
    auto coll = generate_case_collection(2, 2.0, 2, 7, 11, 5).quadtiles;
    REQUIRE(coll.size() >= 3);
    for (int j = 1; j <= 4; ++j) {
        auto arr = coefficient_array(f, coll, j, j == 4 ? 0 : 1);
        REQUIRE(arr.size() == coll.size());
        for (std::size_t i = 0; i < coll.size(); ++i) {
            Cplx single = inner_product(
                f, make_wave_packet(coll[i].tile(j), 2.0, j == 4 ? 0 : 1));
            CHECK(arr[i] == single);
        }
    }
}

TEST_CASE("decay certificates are scale covariant") {
    for (int M : {2, 6, 10}) {
        double base = decay_constant(make_wave_packet(make_tile(0, 0, 1), 2.0, 0), M);
        CHECK(base > 0.0);
        CHECK(std::isfinite(base));
        for (int k : {-2, 3}) {
            double other =
                decay_constant(make_wave_packet(make_tile(k, 2, 1), 2.0, 0), M);
            CHECK(other == doctest::Approx(base).epsilon(1e-9));
        }
    }
}
