#include "tfa/fourier_coeff.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <thread>

#include "tfa/quadrature.hpp"
#include "tfa/symbol.hpp"

namespace tfa {

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

// Smooth monotone cutoff: 1 for |t| <= 1, 0 for |t| >= 2.
double theta_cut(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    double x = 2.0 - a;
    return f(x) / (f(x) + f(1.0 - x));
}

// Annulus bump at scale 2^k, supported on 2^(k-1) <= |t| <= 2^(k+1).
double psi_ann(double t, int k) {
    return theta_cut(t / p2(k)) - theta_cut(t / p2(k - 1));
}

void check_envelope_params(const CoeffEnvelopeParams& p) {
    if (p.M1 < 2 || p.M2 < 2 || p.M3 < 2 || p.M4 < 2)
        throw std::invalid_argument("decay_envelope: exponents must be >= 2");
    if (p.c1 <= 0 || p.c2 <= 0 || p.c3 <= 0 || p.c4 <= 0 || p.c5 <= 0 || p.c6 <= 0)
        throw std::invalid_argument("decay_envelope: constants must be positive");
}

} // namespace

double decay_envelope(int n1, int n2, int n3, double beta,
                      const CoeffEnvelopeParams& p) {
    check_envelope_params(p);
    auto ab = angle_bracket;
    double b2 = n2 / beta;
    double t1 = p.c1 / (ab(n3) * ab(n3) * std::pow(ab(n1 - n3), p.M2) *
                        std::pow(ab(n2 - beta * n3), p.M3));
    double t2 = p.c2 / (ab(n3) * ab(n3) * std::pow(ab(n1), p.M2) *
                        std::pow(ab(n2 - beta * n3), p.M3));
    double t3 = p.c3 / (std::pow(ab(n3), p.M1) * std::pow(ab(n1 - b2), p.M2) *
                        std::pow(ab(n3 - b2), p.M3));
    double t4 = p.c4 / (std::pow(ab(n3), p.M1) * std::pow(ab(n1), p.M2) *
                        std::pow(ab(n3 - b2), p.M3));
    double t5 = p.c5 / (std::pow(ab(n3), p.M1) * std::pow(ab(n2), p.M2) *
                        std::pow(ab(n3 - n1), p.M3) *
                        std::pow(ab(n2 - beta * n1), p.M4));
    double t6 = p.c6 / (std::pow(ab(n3), p.M1) * std::pow(ab(n2), p.M2) *
                        std::pow(ab(n1), p.M3));
    return t1 + t2 + t3 + t4 + t5 + t6;
}

RescaledCube rescale(const QuadTile& qt, int case_id) {
    RescaledCube out;
    out.case_id = case_id;
    Rat s = pow2(-qt.freq[0].j);
    for (int i = 0; i < 3; ++i) {
        RatInterval w = qt.freq[std::size_t(i)].realize();
        out.q[std::size_t(i)] = RatInterval{w.lo * s, w.hi * s};
    }
    return out;
}

double atilde(double xi1, double u) {
    // Telescoping sum of annulus-times-lowpass products over dyadic scales
    // k >= -3: equal to 1 - theta(xi1/2^-4) theta(u/2^-4), i.e. exactly 1
    // once max(|xi1|, |u|) >= 2^-3 and decaying to 0 at the plane origin.
    // Every admissible case support keeps one of the two coordinates at
    // distance >= 1/2, so the weight is 1 there; a support reaching into the
    // degenerate neighbourhood signals a malformed cube. Only the handful of
    // scales near log2 of each argument contribute to the sum.
    constexpr int kmin = -3;
    std::set<int> ks;
    auto add = [&](double t) {
        if (t == 0.0) return;
        int k0 = int(std::floor(std::log2(std::abs(t))));
        for (int k = k0 - 1; k <= k0 + 2; ++k)
            if (k >= kmin) ks.insert(k);
    };
    add(xi1);
    add(u);
    double total = 0.0;
    for (int k : ks)
        total += psi_ann(xi1, k) * theta_cut(u / p2(k)) +
                 theta_cut(xi1 / p2(k - 1)) * psi_ann(u, k);
    return total;
}

namespace {

// Shared core of the rescaled and at-scale coefficient integrals. Centers are
// in units of the side length L. The inner xi3 axis breaks at both kink
// planes of the averaged symbol; the xi1 and xi2 axes break where those
// planes cross the support edges, so every panel sees a smooth integrand.
Cplx coeff_core(const std::array<double, 3>& c, double L, int n1, int n2, int n3,
                double beta, int refine) {
    BumpProfile prof;
    double w = prof.width * L;
    std::array<double, 3> lo, hi, sc;
    for (int i = 0; i < 3; ++i) {
        sc[std::size_t(i)] = c[std::size_t(i)] * L;
        lo[std::size_t(i)] = sc[std::size_t(i)] - w;
        hi[std::size_t(i)] = sc[std::size_t(i)] + w;
    }
    auto panels = [&](int n) {
        return refine * std::max(3, int(std::ceil(0.45 * std::abs(n))));
    };
    double amin = 1e300, amax = -1e300;

    std::vector<double> b2;
    for (double e3 : {lo[2], hi[2]}) b2.push_back(-e3 / beta);
    for (double e1 : {lo[0], hi[0]})
        for (double e3 : {lo[2], hi[2]}) b2.push_back(-(e1 + e3) / beta);

    Cplx total = integrate(
        [&](double xi2) {
            std::vector<double> b1 = {-beta * xi2 - lo[2], -beta * xi2 - hi[2]};
            Cplx mid = integrate(
                [&](double xi1) {
                    std::vector<double> b3 = {-beta * xi2, -xi1 - beta * xi2};
                    Cplx inner = integrate(
                        [&](double xi3) {
                            double u = beta * xi2 + xi3;
                            double sym = xi1 != 0.0
                                             ? primitive_G(xi1, u) / xi1
                                             : (u > 0.0 ? 1.0 : 0.0);
                            double a = atilde(xi1, u);
                            amin = std::min(amin, a);
                            amax = std::max(amax, a);
                            double bump = prof.fourier(xi1 / L - c[0]) *
                                          prof.fourier(xi2 / L - c[1]) *
                                          prof.fourier(xi3 / L - c[2]);
                            double phase = -2.0 * M_PI *
                                           (n1 * xi1 + n2 * xi2 + n3 * xi3) / L;
                            return sym / a * bump *
                                   Cplx(std::cos(phase), std::sin(phase));
                        },
                        lo[2], hi[2], b3, panels(n3));
                    return inner;
                },
                lo[0], hi[0], b1, panels(n1));
            return mid;
        },
        lo[1], hi[1], b2, panels(n2));

    if (amin <= 0.1 || amax >= 10.0)
        throw std::domain_error("coefficient integral: partition weight out of "
                                "(1/10, 10) on the support");
    return total / (L * L * L);
}

std::array<double, 3> cube_centers(const RescaledCube& cube) {
    std::array<double, 3> c;
    for (int i = 0; i < 3; ++i)
        c[std::size_t(i)] = to_double(cube.q[std::size_t(i)].center());
    return c;
}

void validate_cube(const RescaledCube& cube, double beta) {
    SymbolParams params(beta);  // rejects beta in {0, 1}
    (void)params;
    for (const auto& qi : cube.q)
        if (qi.length() != Rat(1))
            throw std::invalid_argument("compute_C: cube sides must be unit");
    bool overlap = cube.q[1].overlaps(cube.q[2]);
    if (cube.case_id == 1) {
        if (!overlap)
            throw std::invalid_argument("compute_C: case-1 cube needs "
                                        "overlapping second and third sides");
    } else if (cube.case_id == 2 || cube.case_id == 3) {
        if (overlap)
            throw std::invalid_argument("compute_C: case-2/3 cube needs "
                                        "disjoint second and third sides");
    } else {
        throw std::invalid_argument("compute_C: case tag must be 1, 2 or 3");
    }
}

} // namespace

Cplx compute_C(const RescaledCube& cube, int n1, int n2, int n3, double beta,
               int refine) {
    validate_cube(cube, beta);
    return coeff_core(cube_centers(cube), 1.0, n1, n2, n3, beta, refine);
}

Cplx compute_C_scaled(const QuadTile& qt, int case_id, int n1, int n2, int n3,
                      double beta, int refine) {
    RescaledCube cube = rescale(qt, case_id);
    validate_cube(cube, beta);
    return coeff_core(cube_centers(cube), p2(qt.freq[0].j), n1, n2, n3, beta,
                      refine);
}

double fit_decay_order(const RescaledCube& cube, int axis, double beta,
                       const std::vector<int>& ns) {
    if (axis < 1 || axis > 3)
        throw std::invalid_argument("fit_decay_order: axis must be 1, 2 or 3");
    std::vector<double> xs, ys;
    for (int n : ns) {
        std::array<int, 3> nv{0, 0, 0};
        nv[std::size_t(axis - 1)] = n;
        double v = std::abs(compute_C(cube, nv[0], nv[1], nv[2], beta));
        if (v < 1e-13) continue;  // below the quadrature floor
        xs.push_back(std::log(angle_bracket(n)));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 2)
        throw std::invalid_argument("fit_decay_order: too few usable points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= double(xs.size());
    my /= double(xs.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return -num / den;
}

DecayReport verify_decay(const std::vector<CaseCollection>& sample,
                         const std::vector<std::array<int, 3>>& ngrid,
                         double beta, const CoeffEnvelopeParams& params,
                         int threads) {
    check_envelope_params(params);
    struct Task {
        RescaledCube cube;
        int case_id, scale, n1, n2, n3;
    };
    std::vector<Task> tasks;
    for (const auto& coll : sample)
        for (const auto& qt : coll.quadtiles)
            for (const auto& n : ngrid)
                tasks.push_back({rescale(qt, coll.case_id), coll.case_id,
                                 qt.freq[0].j, n[0], n[1], n[2]});

    DecayReport report;
    report.records.resize(tasks.size());
    int nt = std::max(1, threads);
    auto worker = [&](int id) {
        for (std::size_t i = std::size_t(id); i < tasks.size(); i += std::size_t(nt)) {
            const Task& t = tasks[i];
            DecayRecord r;
            r.case_id = t.case_id;
            r.scale = t.scale;
            r.n1 = t.n1;
            r.n2 = t.n2;
            r.n3 = t.n3;
            r.abs_c = std::abs(compute_C(t.cube, t.n1, t.n2, t.n3, beta));
            r.envelope = decay_envelope(t.n1, t.n2, t.n3, beta, params);
            r.ratio = r.abs_c / r.envelope;
            report.records[i] = r;
        }
    };
    if (nt == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker, i);
        for (auto& th : pool) th.join();
    }

    for (const auto& r : report.records) {
        report.K = std::max(report.K, r.ratio);
        auto& kc = report.K_by_case[r.case_id];
        kc = std::max(kc, r.ratio);
        auto& ks = report.K_by_scale[r.scale];
        ks = std::max(ks, r.ratio);
    }
    return report;
}

std::string decay_report_csv(const DecayReport& report) {
    std::string out = "case,scale,n1,n2,n3,abs_c,envelope,ratio\n";
    char buf[256];
    for (const auto& r : report.records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%d,%.17g,%.17g,%.17g\n",
                      r.case_id, r.scale, r.n1, r.n2, r.n3, r.abs_c, r.envelope,
                      r.ratio);
        out += buf;
    }
    return out;
}

SummabilityReport summability_check(double p4, const CoeffEnvelopeParams& params,
                                    int jmax, double beta) {
    if (p4 <= 0) throw std::invalid_argument("summability_check: p4 must be > 0");
    check_envelope_params(params);
    constexpr long long W = 12;  // window radius around concentration centers
    SummabilityReport report;
    for (int j = 1; j <= jmax; ++j) {
        double sum = 0.0;
        long long lo = (1LL << j) - 2, hi = 2 * (1LL << j) - 3;
        std::set<long long> n3s;
        for (long long a = lo; a <= hi; ++a) {
            n3s.insert(a);
            n3s.insert(-a);
        }
        for (long long n3 : n3s) {
            std::set<long long> n1s;
            for (long long c : {0LL, n3})
                for (long long d = -W; d <= W; ++d) n1s.insert(c + d);
            for (long long n1 : n1s) {
                std::set<long long> n2s;
                for (long long c : {0LL, std::llround(beta * double(n3)),
                                    std::llround(beta * double(n1))})
                    for (long long d = -W; d <= W; ++d) n2s.insert(c + d);
                for (long long n2 : n2s)
                    sum += std::pow(decay_envelope(int(n1), int(n2), int(n3),
                                                   beta, params),
                                    p4);
            }
        }
        report.block_sums.push_back(sum);
        if (report.block_sums.size() >= 2)
            report.ratios.push_back(sum / report.block_sums[report.block_sums.size() - 2]);
    }
    return report;
}

} // namespace tfa
