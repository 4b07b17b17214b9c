#include "tfa/bandlimited.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tfa {

Cplx BandlimitedFn::eval(double x) const {
    Cplx s = 0;
    for (const auto& [k, c] : coeffs) {
        double ph = 2.0 * std::numbers::pi * double(k) * x / period;
        s += c * Cplx(std::cos(ph), std::sin(ph));
    }
    return s;
}

int BandlimitedFn::max_mode() const {
    int m = 0;
    for (const auto& [k, c] : coeffs) m = std::max(m, std::abs(k));
    return m;
}

BandlimitedFn add(const BandlimitedFn& a, const BandlimitedFn& b) {
    if (a.period != b.period)
        throw std::invalid_argument("add: period mismatch");
    BandlimitedFn r = a;
    for (const auto& [k, c] : b.coeffs) r.set(k, r.coeff(k) + c);
    return r;
}

BandlimitedFn scale(const BandlimitedFn& a, Cplx c) {
    BandlimitedFn r(a.period);
    for (const auto& [k, v] : a.coeffs) r.set(k, c * v);
    return r;
}

BandlimitedFn multiply(const BandlimitedFn& a, const BandlimitedFn& b) {
    if (a.period != b.period)
        throw std::invalid_argument("multiply: period mismatch");
    BandlimitedFn r(a.period);
    for (const auto& [ka, ca] : a.coeffs)
        for (const auto& [kb, cb] : b.coeffs)
            r.set(ka + kb, r.coeff(ka + kb) + ca * cb);
    return r;
}

BandlimitedFn random_bandlimited(Rng& rng, int kmax, double period,
                                 bool mean_zero) {
    BandlimitedFn f(period);
    for (int k = -kmax; k <= kmax; ++k) {
        if (mean_zero && k == 0) continue;
        double r = std::sqrt(rng.uniform());
        double th = rng.uniform(0, 2.0 * std::numbers::pi);
        f.set(k, Cplx(r * std::cos(th), r * std::sin(th)));
    }
    return f;
}

SampledFunction sample(const BandlimitedFn& f, std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("sample: grid size must be a power of two");
    SampledFunction s;
    s.period = f.period;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = f.eval(s.point(i));
    return s;
}

double lp_norm(const SampledFunction& f, double p) {
    if (p <= 0.0) throw std::invalid_argument("lp_norm: p must be positive");
    if (f.values.empty()) return 0.0;
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (const auto& v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s * f.dx(), 1.0 / p);
}

} // namespace tfa
