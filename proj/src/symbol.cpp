#include "tfa/symbol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tfa/quadrature.hpp"

namespace tfa {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Normalization of the mother bump exp(-1/(1-x^2)) on (-1,1); computed once.
double bump_mass() {
    static const double m = [] {
        auto f = [](double x) { return std::exp(-1.0 / (1.0 - x * x)); };
        return integrate(f, -1.0 + 1e-14, 1.0 - 1e-14, {}, 64);
    }();
    return m;
}

} // namespace

double m_plus(const SymbolParams& p, const FrequencyTriple& xi) {
    double a = xi.xi1, c = p.beta * xi.xi2 + xi.xi3;
    if (a > 0.0) return 1.0 - clamp01(-c / a);
    if (a < 0.0) return clamp01(-c / a);
    return c > 0.0 ? 1.0 : 0.0;
}

double m_sgn(const SymbolParams& p, const FrequencyTriple& xi) {
    return 2.0 * m_plus(p, xi) - 1.0;
}

double primitive_G(double a, double c) {
    double lo = std::min(0.0, a), hi = std::max(0.0, a);
    double measure = std::max(0.0, hi - std::max(lo, -c));
    return a >= 0.0 ? measure : -measure;
}

double m_plus_quadrature(const SymbolParams& p, const FrequencyTriple& xi, int nodes) {
    double c = p.beta * xi.xi2 + xi.xi3;
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double alpha = (i + 0.5) / nodes;
        sum += (alpha * xi.xi1 + c > 0.0) ? 1.0 : 0.0;
    }
    return sum / nodes;
}

double BumpFn::operator()(double x) const {
    double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double BumpFn::d1(double x) const {
    double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    double q = 1.0 - u * u;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * u / (q * q)) / radius;
}

double BumpFn::d2(double x) const {
    double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    double q = 1.0 - u * u;
    double g = -2.0 * u / (q * q);               // (d/du) of -1/q
    double gp = (-2.0 * q - 8.0 * u * u) / (q * q * q);
    return std::exp(1.0 - 1.0 / q) * (g * g + gp) / (radius * radius);
}

double mollifier(double x, double width) {
    if (std::abs(x) >= width) return 0.0;
    double u = x / width;
    return std::exp(-1.0 / (1.0 - u * u)) / (bump_mass() * width);
}

namespace {

// Pairing of a mollified delta at position x0 with a smooth g:
// integral of rho_w(t - x0) g(t) dt over the mollifier support.
template <class G>
double paired_delta(double x0, double width, const G& g, int nodes_panels = 8) {
    auto f = [&](double t) { return mollifier(t - x0, width) * g(t); };
    return integrate(f, x0 - width, x0 + width, {}, nodes_panels);
}

} // namespace

double verify_delta_identity(DeltaIdentity id, const DeltaIdentityProbe& probe,
                             double width) {
    if (width <= 0.0) throw std::invalid_argument("mollifier width must be positive");
    const double beta = probe.params.beta;
    const BumpFn& psi = probe.bump;
    const BumpFn& phi = probe.bump2;
    const int panels = probe.quad_panels;
    auto F = [&](double x1, double x2, double x3) {
        return primitive_G(x1, beta * x2 + x3);
    };
    const double x1 = probe.xi1, x2 = probe.xi2, x3 = probe.xi3;

    double lhs = 0.0, rhs = 0.0;
    switch (id) {
    case DeltaIdentity::A: {
        // d^2/dxi3^2 F = delta(xi1 + beta xi2 + xi3) - delta(beta xi2 + xi3)
        std::vector<double> kinks = {-beta * x2, -x1 - beta * x2};
        auto f = [&](double t) { return F(x1, x2, t) * psi.d2(t); };
        lhs = integrate(f, psi.center - psi.radius, psi.center + psi.radius, kinks,
                        panels);
        rhs = paired_delta(-x1 - beta * x2, width, psi) -
              paired_delta(-beta * x2, width, psi);
        break;
    }
    case DeltaIdentity::B: {
        // d2 d3 F = beta (delta(xi1 + beta xi2 + xi3) - delta(beta xi2 + xi3));
        // test with psi(xi2) phi(xi3).
        auto inner = [&](double s) {
            std::vector<double> kinks = {-beta * s, -x1 - beta * s};
            auto f = [&](double t) { return F(x1, s, t) * phi.d1(t); };
            return integrate(f, phi.center - phi.radius, phi.center + phi.radius,
                             kinks, panels);
        };
        auto outer = [&](double s) { return psi.d1(s) * inner(s); };
        lhs = integrate(outer, psi.center - psi.radius, psi.center + psi.radius, {},
                        panels);
        auto rg = [&](double s) {
            return psi(s) * (paired_delta(-x1 - beta * s, width, phi) -
                             paired_delta(-beta * s, width, phi));
        };
        rhs = beta * integrate(rg, psi.center - psi.radius, psi.center + psi.radius,
                               {}, panels);
        break;
    }
    case DeltaIdentity::C: {
        // d1 d3 F = delta(xi1 + beta xi2 + xi3); test with psi(xi1) phi(xi3).
        auto inner = [&](double s) {
            std::vector<double> kinks = {-beta * x2, -s - beta * x2};
            auto f = [&](double t) { return F(s, x2, t) * phi.d1(t); };
            return integrate(f, phi.center - phi.radius, phi.center + phi.radius,
                             kinks, panels);
        };
        auto outer = [&](double s) { return psi.d1(s) * inner(s); };
        lhs = integrate(outer, psi.center - psi.radius, psi.center + psi.radius, {},
                        panels);
        auto rg = [&](double s) {
            return psi(s) * paired_delta(-s - beta * x2, width, phi);
        };
        rhs = integrate(rg, psi.center - psi.radius, psi.center + psi.radius, {},
                        panels);
        break;
    }
    case DeltaIdentity::D: {
        // d^2/dxi2^2 F = beta^2 (delta(xi1 + beta xi2 + xi3) - delta(beta xi2 + xi3))
        std::vector<double> kinks;
        if (beta != 0.0) kinks = {-x3 / beta, (-x1 - x3) / beta};
        auto f = [&](double s) { return F(x1, s, x3) * psi.d2(s); };
        lhs = integrate(f, psi.center - psi.radius, psi.center + psi.radius, kinks,
                        panels);
        double ab = std::abs(beta);
        rhs = beta * beta / ab *
              (paired_delta((-x1 - x3) / beta, width, psi) -
               paired_delta(-x3 / beta, width, psi));
        break;
    }
    case DeltaIdentity::E: {
        // d1 d2 F = beta delta(xi1 + beta xi2 + xi3); test with psi(xi1) phi(xi2).
        auto inner = [&](double s) {
            std::vector<double> kinks;
            if (beta != 0.0) kinks = {-x3 / beta, (-s - x3) / beta};
            auto f = [&](double t) { return F(s, t, x3) * phi.d1(t); };
            return integrate(f, phi.center - phi.radius, phi.center + phi.radius,
                             kinks, panels);
        };
        auto outer = [&](double s) { return psi.d1(s) * inner(s); };
        lhs = integrate(outer, psi.center - psi.radius, psi.center + psi.radius, {},
                        panels);
        auto rg = [&](double s) {
            return psi(s) * paired_delta((-s - x3) / beta, width, phi) /
                   std::abs(beta);
        };
        rhs = beta * integrate(rg, psi.center - psi.radius, psi.center + psi.radius,
                               {}, panels);
        break;
    }
    case DeltaIdentity::F: {
        // d^2/dxi1^2 F = delta(xi1 + beta xi2 + xi3)
        std::vector<double> kinks = {-beta * x2 - x3};
        auto f = [&](double s) { return F(s, x2, x3) * psi.d2(s); };
        lhs = integrate(f, psi.center - psi.radius, psi.center + psi.radius, kinks,
                        panels);
        rhs = paired_delta(-beta * x2 - x3, width, psi);
        break;
    }
    default:
        throw std::invalid_argument("unknown delta identity");
    }
    return std::abs(lhs - rhs);
}

} // namespace tfa
