#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace tfa {

// 16-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
auto gl16(const F& f, double a, double b) -> decltype(f(a) + f(b)) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    decltype(f(a) + f(b)) s{};
    for (int i = 0; i < 8; ++i) {
        double x = h * kGlNodes[i];
        s += kGlWeights[i] * (f(c + x) + f(c - x));
    }
    return s * h;
}

// Composite Gauss-Legendre on [a, b], split at interior breakpoints so that
// integrands that are only piecewise smooth are still integrated to high order.
template <class F>
auto integrate(const F& f, double a, double b, std::vector<double> breaks,
               int panels) -> decltype(f(a) + f(b)) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    decltype(f(a) + f(b)) total{};
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
        if (hi <= lo) continue;
        int n = std::max(1, int(std::ceil(panels * (hi - lo) / (b - a))));
        double h = (hi - lo) / n;
        for (int k = 0; k < n; ++k) total += gl16(f, lo + k * h, lo + (k + 1) * h);
    }
    return total;
}

} // namespace tfa
