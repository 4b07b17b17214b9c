#pragma once

#include <functional>
#include <stdexcept>

namespace tfa {

// Parameters of the trilinear operator family. beta = 0 and beta = 1
// degenerate to products of classical operators and are excluded.
struct SymbolParams {
    double beta;

    explicit SymbolParams(double b) : beta(b) {
        if (b == 0.0 || b == 1.0)
            throw std::invalid_argument("SymbolParams: beta must avoid {0,1}");
    }
};

struct FrequencyTriple {
    double xi1, xi2, xi3;
};

// Averaged symbol m_plus(xi) = |{alpha in [0,1] : alpha*xi1 + beta*xi2 + xi3 > 0}|,
// in closed form. Convention: the indicator of the open positive axis, so the
// boundary value at 0 contributes nothing.
double m_plus(const SymbolParams& p, const FrequencyTriple& xi);

// Signed variant, equal to the alpha-average of sgn(alpha*xi1 + beta*xi2 + xi3).
double m_sgn(const SymbolParams& p, const FrequencyTriple& xi);

// Signed primitive G(a, c) = integral of 1_{R+}(t + c) over t from 0 to a.
// m_plus(xi) = G(xi1, beta*xi2 + xi3) / xi1 for xi1 != 0.
double primitive_G(double a, double c);

// Quadrature oracle for m_plus: composite-midpoint over alpha with `nodes` nodes.
double m_plus_quadrature(const SymbolParams& p, const FrequencyTriple& xi, int nodes);

// --- Distributional derivative identities of the symbol primitive ---
//
// F(xi1, xi2, xi3) := G(xi1, beta*xi2 + xi3) has second-order distributional
// derivatives supported on the planes xi1 + beta*xi2 + xi3 = 0 and
// beta*xi2 + xi3 = 0. Each identity is checked weakly: the left side pairs F
// with derivatives of a compactly supported bump by quadrature; the right side
// pairs the delta combination with the bump via a mollifier of width `width`.
// The returned residual tends to 0 with the width.

enum class DeltaIdentity { A, B, C, D, E, F };

// A smooth compactly supported test profile with two analytic derivatives.
// Standard bump exp(-1/(1-u^2)) on (-1,1), translated/scaled to [center-radius,
// center+radius] and normalized to unit peak.
struct BumpFn {
    double center = 0.0;
    double radius = 1.0;

    double operator()(double x) const;
    double d1(double x) const;
    double d2(double x) const;
};

// Unit-mass mollifier of width w built from the same profile.
double mollifier(double x, double width);

struct DeltaIdentityProbe {
    SymbolParams params;
    double xi1 = 1.0;  // fixed frequency for identities with one free variable
    double xi2 = 0.0;
    double xi3 = 0.0;
    BumpFn bump;        // first test factor
    BumpFn bump2;       // second factor for mixed-derivative identities
    int quad_panels = 64;   // composite Gauss-Legendre panels per axis
};

double verify_delta_identity(DeltaIdentity id, const DeltaIdentityProbe& probe,
                             double mollifier_width);

} // namespace tfa
