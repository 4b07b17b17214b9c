#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "tfa/rng.hpp"

namespace tfa {

using Cplx = std::complex<double>;

// Finite trigonometric polynomial on a torus of length `period`:
// f(x) = sum_k c_k exp(2 pi i k x / period). The frequency of mode k is
// k / period cycles per unit length.
struct BandlimitedFn {
    double period = 1.0;
    std::map<int, Cplx> coeffs;

    BandlimitedFn() = default;
    explicit BandlimitedFn(double L) : period(L) {
        if (L <= 0) throw std::invalid_argument("BandlimitedFn: period must be > 0");
    }

    Cplx eval(double x) const;
    Cplx coeff(int k) const {
        auto it = coeffs.find(k);
        return it == coeffs.end() ? Cplx(0) : it->second;
    }
    BandlimitedFn& set(int k, Cplx c) {
        if (c == Cplx(0)) coeffs.erase(k); else coeffs[k] = c;
        return *this;
    }
    int max_mode() const;
    bool mean_zero() const { return coeff(0) == Cplx(0); }
};

BandlimitedFn add(const BandlimitedFn& a, const BandlimitedFn& b);
BandlimitedFn scale(const BandlimitedFn& a, Cplx c);
BandlimitedFn multiply(const BandlimitedFn& a, const BandlimitedFn& b);

// Random trigonometric polynomial with modes |k| <= kmax and coefficients
// uniform in the unit disc. mean_zero drops the k = 0 mode.
BandlimitedFn random_bandlimited(Rng& rng, int kmax, double period,
                                 bool mean_zero);

// Uniform samples of a complex function over one period; grid size a power
// of two.
struct SampledFunction {
    double period = 1.0;
    std::vector<Cplx> values;

    double dx() const { return period / double(values.size()); }
    double point(std::size_t i) const { return double(i) * dx(); }
};

SampledFunction sample(const BandlimitedFn& f, std::size_t n);

// Riemann-sum L^p norm over one period; p = infinity() gives the grid max.
double lp_norm(const SampledFunction& f, double p);

} // namespace tfa
