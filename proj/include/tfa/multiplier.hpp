#pragma once

#include <functional>
#include <vector>

#include "tfa/bandlimited.hpp"
#include "tfa/symbol.hpp"

namespace tfa {

// Frequency-side trilinear multiplier: output mode k1+k2+k3 accumulates
// m(k1/L, k2/L, k3/L) c1 c2 c3 over all supported mode triples.
using SymbolEvaluator = std::function<double(const FrequencyTriple&)>;

BandlimitedFn apply_trilinear(const SymbolEvaluator& m, const BandlimitedFn& f1,
                              const BandlimitedFn& f2, const BandlimitedFn& f3);

// The reduced operator: multiplier is the alpha-averaged positive-part symbol.
BandlimitedFn apply_tilde(const SymbolParams& p, const BandlimitedFn& f1,
                          const BandlimitedFn& f2, const BandlimitedFn& f3);

struct QuadratureSpec {
    double epsilon = 1e-4;  // inner principal-value cutoff
    double t_max = 1e3;     // outer cutoff
    int nodes_t = 1 << 14;  // minimum total node count over (epsilon, t_max)
    int nodes_alpha = 0;    // 0: exact per-mode average; > 0: Gauss-Legendre

    void validate() const;
};

// Truncated principal-value integral
//   integral over epsilon < |t| < t_max of
//     [avg_alpha f1(x + alpha t)] f2(x + beta t) f3(x + t) dt / t
// evaluated at grid_n uniform points. Nodes come in symmetric +-t pairs so the
// odd kernel cancels stably; the panel schedule refines nodes_t until the
// fastest mode oscillation is resolved. Work is split over `threads` in fixed
// chunks, so results do not depend on the thread count.
SampledFunction apply_timedomain_pv(const SymbolParams& p,
                                    const BandlimitedFn& f1,
                                    const BandlimitedFn& f2,
                                    const BandlimitedFn& f3,
                                    const QuadratureSpec& q, std::size_t grid_n,
                                    int threads = 1);

// Truncation remainder of the principal value: the exact contribution of
// |t| < epsilon and |t| > t_max under symmetric pairing. For trigonometric
// inputs both pieces reduce per mode triple to sine-integral expressions, so
// pv + pv_truncation_tail realizes the full limit up to quadrature error.
// Assumes the exact per-mode alpha average (nodes_alpha = 0).
SampledFunction pv_truncation_tail(const SymbolParams& p,
                                   const BandlimitedFn& f1,
                                   const BandlimitedFn& f2,
                                   const BandlimitedFn& f3,
                                   const QuadratureSpec& q, std::size_t grid_n);

// Sine integral Si(x), odd, Si(inf) = pi/2.
double sine_integral(double x);

// Max-norm over the grid of f1 f2 f3 - (i/pi) T_pv - 2 T_tilde, where T_pv
// is the tail-completed principal value quadrature. The i/pi
// factor is the principal-value kernel constant: the pairing of 1/t with
// e^{2 pi i theta t} contributes pi i sgn(theta), so the raw truncated
// integral carries pi i times the averaged sign symbol.
double product_identity_check(const SymbolParams& p, const BandlimitedFn& f1,
                              const BandlimitedFn& f2, const BandlimitedFn& f3,
                              const QuadratureSpec& q, std::size_t grid_n,
                              int threads = 1);

struct ExponentResult {
    bool accepted = false;
    double p = 0.0;  // p1 p2 p3 / (p1 p2 + p1 p3 + p2 p3), via reciprocals
};

// Exponent gate: p_i in (1, inf], accept iff 1/2 < p < inf and
// 2/3 < p2 p3 / (p2 + p3) <= inf. Use infinity() for an infinite exponent.
ExponentResult validate_exponents(double p1, double p2, double p3);

struct SweepConfig {
    double p1 = 4, p2 = 4, p3 = 4;
    double beta = 2.0;
    int trials = 200;
    int kmax = 16;
    std::size_t grid_n = 512;
    double period = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct RatioRecord {
    int trial;
    std::uint64_t seed;
    double p1, p2, p3, p, beta;
    int modes;
    double ratio;
};

// Per-trial ratio ||T_tilde(f1,f2,f3)||_p / prod ||f_i||_{p_i} on random
// band-limited inputs.
std::vector<RatioRecord> holder_ratio_sweep(const SweepConfig& cfg);

// f(x) -> f(m x) on the same torus: mode k moves to mode m k.
BandlimitedFn dilate_modes(const BandlimitedFn& f, int m);

} // namespace tfa
