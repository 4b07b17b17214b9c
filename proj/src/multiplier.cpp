#include "tfa/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace tfa {

namespace {

constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

Cplx unit_phase(double turns) {
    double ph = 2.0 * kPi * turns;
    return {std::cos(ph), std::sin(ph)};
}

struct ModeTable {
    std::vector<int> modes;
    std::vector<Cplx> coeff;
    // grid_phase[m * n + i] = exp(2 pi i k_m x_i / L)
    std::vector<Cplx> grid_phase;
    std::size_t n;

    ModeTable(const BandlimitedFn& f, std::size_t grid_n) : n(grid_n) {
        for (const auto& [k, c] : f.coeffs) {
            modes.push_back(k);
            coeff.push_back(c);
        }
        grid_phase.resize(modes.size() * n);
        for (std::size_t m = 0; m < modes.size(); ++m)
            for (std::size_t i = 0; i < n; ++i)
                grid_phase[m * n + i] =
                    unit_phase(double(modes[m]) * double(i) / double(n));
    }

    // row[i] += sum_m coeff[m] * factor[m] * grid_phase[m][i]
    void accumulate(const std::vector<Cplx>& factor, std::vector<Cplx>& row) const {
        std::fill(row.begin(), row.end(), Cplx(0));
        for (std::size_t m = 0; m < modes.size(); ++m) {
            Cplx w = coeff[m] * factor[m];
            const Cplx* gp = &grid_phase[m * n];
            for (std::size_t i = 0; i < n; ++i) row[i] += w * gp[i];
        }
    }
};

// avg over alpha in [0,1] of exp(2 pi i k alpha t / L), exactly.
Cplx exact_alpha_factor(int k, double t_over_L) {
    if (k == 0) return 1.0;
    double phi = 2.0 * kPi * double(k) * t_over_L;
    if (std::abs(phi) < 1e-8) return {1.0 - phi * phi / 6.0, phi / 2.0};
    // (e^{i phi} - 1) / (i phi)
    Cplx num = Cplx(std::cos(phi) - 1.0, std::sin(phi));
    return num / Cplx(0.0, phi);
}

struct PvNode {
    double t;       // positive abscissa; evaluated at both +t and -t
    double weight;  // plain panel weight
};

// Positive-axis node schedule: octave panels refined until the fastest mode
// oscillation is resolved, with nodes_t as a floor on the total count.
std::vector<PvNode> pv_schedule(const QuadratureSpec& q, double max_freq) {
    struct Panel { double a, b; int sub; };
    std::vector<Panel> panels;
    double a = q.epsilon;
    long total = 0;
    while (a < q.t_max) {
        double b = std::min(2.0 * a, q.t_max);
        double periods = max_freq * (b - a);
        int sub = std::max(1, int(std::ceil(periods / 2.5)));
        panels.push_back({a, b, sub});
        total += 16L * sub;
        a = b;
    }
    if (total < q.nodes_t) {
        double boost = double(q.nodes_t) / double(total);
        for (auto& p : panels) p.sub = int(std::ceil(p.sub * boost));
    }
    std::vector<PvNode> nodes;
    for (const auto& p : panels) {
        double h = (p.b - p.a) / p.sub;
        for (int s = 0; s < p.sub; ++s) {
            double c = p.a + (s + 0.5) * h, hh = 0.5 * h;
            for (int i = 0; i < 8; ++i) {
                double w = kGlWeights[i] * hh;
                nodes.push_back({c + hh * kGlNodes[i], w});
                nodes.push_back({c - hh * kGlNodes[i], w});
            }
        }
    }
    return nodes;
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(epsilon > 0.0) || !(epsilon < t_max))
        throw std::invalid_argument("QuadratureSpec: need 0 < epsilon < t_max");
    if (nodes_t < 2 || nodes_alpha < 0)
        throw std::invalid_argument("QuadratureSpec: bad node counts");
}

BandlimitedFn apply_trilinear(const SymbolEvaluator& m, const BandlimitedFn& f1,
                              const BandlimitedFn& f2, const BandlimitedFn& f3) {
    if (f1.period != f2.period || f1.period != f3.period)
        throw std::invalid_argument("apply_trilinear: period mismatch");
    double L = f1.period;
    BandlimitedFn out(L);
    for (const auto& [k1, c1] : f1.coeffs)
        for (const auto& [k2, c2] : f2.coeffs)
            for (const auto& [k3, c3] : f3.coeffs) {
                FrequencyTriple xi{k1 / L, k2 / L, k3 / L};
                Cplx v = m(xi) * c1 * c2 * c3;
                int k = k1 + k2 + k3;
                out.set(k, out.coeff(k) + v);
            }
    return out;
}

BandlimitedFn apply_tilde(const SymbolParams& p, const BandlimitedFn& f1,
                          const BandlimitedFn& f2, const BandlimitedFn& f3) {
    return apply_trilinear(
        [&p](const FrequencyTriple& xi) { return m_plus(p, xi); }, f1, f2, f3);
}

SampledFunction apply_timedomain_pv(const SymbolParams& p,
                                    const BandlimitedFn& f1,
                                    const BandlimitedFn& f2,
                                    const BandlimitedFn& f3,
                                    const QuadratureSpec& q, std::size_t grid_n,
                                    int threads) {
    q.validate();
    if (f1.period != f2.period || f1.period != f3.period)
        throw std::invalid_argument("apply_timedomain_pv: period mismatch");
    const double L = f1.period;
    const std::size_t n = grid_n;

    ModeTable t1(f1, n), t2(f2, n), t3(f3, n);
    double max_freq =
        (f1.max_mode() + std::abs(p.beta) * f2.max_mode() + f3.max_mode()) / L;
    auto nodes = pv_schedule(q, std::max(max_freq, 1.0 / L));

    // Gauss-Legendre alpha rule on [0,1] when requested.
    std::vector<double> an, aw;
    if (q.nodes_alpha > 0) {
        int half = (q.nodes_alpha + 1) / 2;
        for (int i = 0; i < half && i < 8; ++i) {
            an.push_back(0.5 + 0.5 * kGlNodes[i]);
            aw.push_back(0.5 * kGlWeights[i]);
            an.push_back(0.5 - 0.5 * kGlNodes[i]);
            aw.push_back(0.5 * kGlWeights[i]);
        }
    }

    // Fixed-size chunks of nodes; chunk partials are reduced in order, so the
    // result is independent of the thread count.
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (nodes.size() + chunk - 1) / chunk;
    std::vector<std::vector<Cplx>> partial(nchunks, std::vector<Cplx>(n, Cplx(0)));

    auto run_chunk = [&](std::size_t ci) {
        std::vector<Cplx> f1fac(t1.modes.size()), f2fac(t2.modes.size()),
            f3fac(t3.modes.size());
        std::vector<Cplx> row1(n), row2(n), row3(n);
        auto& acc = partial[ci];
        std::size_t lo = ci * chunk, hi = std::min(nodes.size(), lo + chunk);
        for (std::size_t idx = lo; idx < hi; ++idx) {
            double w = nodes[idx].weight;
            for (double t : {nodes[idx].t, -nodes[idx].t}) {
                for (std::size_t m = 0; m < t1.modes.size(); ++m) {
                    int k = t1.modes[m];
                    if (q.nodes_alpha > 0) {
                        Cplx s = 0;
                        for (std::size_t j = 0; j < an.size(); ++j)
                            s += aw[j] * unit_phase(double(k) * an[j] * t / L);
                        f1fac[m] = s;
                    } else {
                        f1fac[m] = exact_alpha_factor(k, t / L);
                    }
                }
                for (std::size_t m = 0; m < t2.modes.size(); ++m)
                    f2fac[m] = unit_phase(double(t2.modes[m]) * p.beta * t / L);
                for (std::size_t m = 0; m < t3.modes.size(); ++m)
                    f3fac[m] = unit_phase(double(t3.modes[m]) * t / L);
                t1.accumulate(f1fac, row1);
                t2.accumulate(f2fac, row2);
                t3.accumulate(f3fac, row3);
                for (std::size_t i = 0; i < n; ++i)
                    acc[i] += (w / t) * row1[i] * row2[i] * row3[i];
            }
        }
    };

    int nt = std::max(1, threads);
    if (nt == 1) {
        for (std::size_t ci = 0; ci < nchunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        for (int th = 0; th < nt; ++th)
            pool.emplace_back([&, th] {
                for (std::size_t ci = th; ci < nchunks; ci += std::size_t(nt))
                    run_chunk(ci);
            });
        for (auto& th : pool) th.join();
    }

    SampledFunction out;
    out.period = L;
    out.values.assign(n, Cplx(0));
    for (std::size_t ci = 0; ci < nchunks; ++ci)
        for (std::size_t i = 0; i < n; ++i) out.values[i] += partial[ci][i];
    return out;
}

double sine_integral(double x) {
    double ax = std::abs(x);
    if (ax < 2.0) {
        // Taylor series: sum (-1)^k x^{2k+1} / ((2k+1) (2k+1)!)
        double term = ax, sum = ax;
        for (int k = 1; k < 40; ++k) {
            term *= -ax * ax / double(2 * k) / double(2 * k + 1);
            sum += term / double(2 * k + 1);
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return x < 0 ? -sum : sum;
    }
    // E1(i x) by the modified Lentz continued fraction;
    // Si(x) = pi/2 + Im(E1(i x)) for x > 0.
    Cplx z(0.0, ax);
    Cplx b = z + 1.0, c = 1.0 / Cplx(1e-30, 0), d = 1.0 / b, h = d;
    for (int i = 1; i < 400; ++i) {
        double a = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        Cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    Cplx e1 = h * std::exp(-z);
    double s = kPi / 2.0 + e1.imag();
    return x < 0 ? -s : s;
}

SampledFunction pv_truncation_tail(const SymbolParams& p,
                                   const BandlimitedFn& f1,
                                   const BandlimitedFn& f2,
                                   const BandlimitedFn& f3,
                                   const QuadratureSpec& q, std::size_t grid_n) {
    q.validate();
    if (f1.period != f2.period || f1.period != f3.period)
        throw std::invalid_argument("pv_truncation_tail: period mismatch");
    const double L = f1.period, eps = q.epsilon, T = q.t_max;

    // Symmetric pairing reduces each mode triple (with c = 2 pi k1/L and
    // nu = 2 pi (beta k2 + k3)/L) to
    //   [2 cos((c+nu) t) - 2 cos(nu t)] / (i c t^2)        (k1 != 0)
    //   2 sin(nu t) / t                                    (k1 = 0)
    // whose integrals over (0, eps) and (T, inf) are sine-integral
    // expressions.
    auto cos_int_tail = [&](double mu) {
        // integral over (T, inf) of cos(mu t) / t^2
        return std::cos(mu * T) / T -
               std::abs(mu) * (kPi / 2.0 - sine_integral(std::abs(mu) * T));
    };
    auto triple_tail = [&](int k1, double nu) -> Cplx {
        if (k1 == 0) {
            double inner = 2.0 * sine_integral(nu * eps);
            double outer =
                nu == 0.0 ? 0.0
                          : 2.0 * ((nu > 0 ? 1.0 : -1.0) * kPi / 2.0 -
                                   sine_integral(nu * T));
            return Cplx(0.0, inner + outer);
        }
        double c = 2.0 * kPi * double(k1) / L;
        double A = c + nu, B = nu;
        double inner = -(std::cos(A * eps) - std::cos(B * eps)) / eps -
                       A * sine_integral(A * eps) + B * sine_integral(B * eps);
        double outer = cos_int_tail(A) - cos_int_tail(B);
        // (2 / (i c)) * (...) = -(2 i / c) * (...)
        return Cplx(0.0, -2.0 / c) * (inner + outer);
    };

    BandlimitedFn acc(L);
    for (const auto& [k1, c1] : f1.coeffs)
        for (const auto& [k2, c2] : f2.coeffs)
            for (const auto& [k3, c3] : f3.coeffs) {
                double nu = 2.0 * kPi * (p.beta * double(k2) + double(k3)) / L;
                Cplx v = c1 * c2 * c3 * triple_tail(k1, nu);
                int k = k1 + k2 + k3;
                acc.set(k, acc.coeff(k) + v);
            }

    SampledFunction out;
    out.period = L;
    out.values.resize(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i)
        out.values[i] = acc.eval(out.point(i));
    return out;
}

double product_identity_check(const SymbolParams& p, const BandlimitedFn& f1,
                              const BandlimitedFn& f2, const BandlimitedFn& f3,
                              const QuadratureSpec& q, std::size_t grid_n,
                              int threads) {
    SampledFunction pv = apply_timedomain_pv(p, f1, f2, f3, q, grid_n, threads);
    SampledFunction tail = pv_truncation_tail(p, f1, f2, f3, q, grid_n);
    for (std::size_t i = 0; i < pv.values.size(); ++i)
        pv.values[i] += tail.values[i];
    BandlimitedFn prod = multiply(multiply(f1, f2), f3);
    BandlimitedFn tld = apply_tilde(p, f1, f2, f3);
    const Cplx i_over_pi(0.0, 1.0 / kPi);
    double worst = 0.0;
    for (std::size_t i = 0; i < pv.values.size(); ++i) {
        double x = pv.point(i);
        Cplx r = prod.eval(x) - i_over_pi * pv.values[i] - 2.0 * tld.eval(x);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ExponentResult validate_exponents(double p1, double p2, double p3) {
    auto check = [](double p) {
        if (!(p > 1.0))
            throw std::invalid_argument("validate_exponents: p_i must be > 1");
    };
    check(p1);
    check(p2);
    check(p3);
    double r1 = 1.0 / p1, r2 = 1.0 / p2, r3 = 1.0 / p3;
    double rsum = r1 + r2 + r3;
    ExponentResult out;
    out.p = rsum == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / rsum;
    // 1/2 < p < inf  <=>  0 < r1+r2+r3 < 2;  2/3 < p2 p3/(p2+p3)  <=>  r2+r3 < 3/2
    out.accepted = rsum > 0.0 && rsum < 2.0 && (r2 + r3) < 1.5;
    return out;
}

BandlimitedFn dilate_modes(const BandlimitedFn& f, int m) {
    BandlimitedFn out(f.period);
    for (const auto& [k, c] : f.coeffs) out.set(k * m, c);
    return out;
}

std::vector<RatioRecord> holder_ratio_sweep(const SweepConfig& cfg) {
    auto res = validate_exponents(cfg.p1, cfg.p2, cfg.p3);
    if (!res.accepted)
        throw std::invalid_argument("holder_ratio_sweep: exponent tuple rejected");
    SymbolParams par(cfg.beta);
    std::vector<RatioRecord> out(cfg.trials);

    auto run_trial = [&](int t) {
        Rng rng = Rng::derive(cfg.seed, std::uint64_t(t));
        BandlimitedFn f1 = random_bandlimited(rng, cfg.kmax, cfg.period, false);
        BandlimitedFn f2 = random_bandlimited(rng, cfg.kmax, cfg.period, false);
        BandlimitedFn f3 = random_bandlimited(rng, cfg.kmax, cfg.period, false);
        BandlimitedFn g = apply_tilde(par, f1, f2, f3);
        double denom = lp_norm(sample(f1, cfg.grid_n), cfg.p1) *
                       lp_norm(sample(f2, cfg.grid_n), cfg.p2) *
                       lp_norm(sample(f3, cfg.grid_n), cfg.p3);
        double num = lp_norm(sample(g, cfg.grid_n), res.p);
        out[t] = {t,      cfg.seed, cfg.p1, cfg.p2,  cfg.p3,
                  res.p,  cfg.beta, 2 * cfg.kmax, denom > 0 ? num / denom : 0.0};
    };

    int nt = std::max(1, cfg.threads);
    if (nt == 1) {
        for (int t = 0; t < cfg.trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        for (int th = 0; th < nt; ++th)
            pool.emplace_back([&, th] {
                for (int t = th; t < cfg.trials; t += nt) run_trial(t);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace tfa
