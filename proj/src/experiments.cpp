#include "tfa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "tfa/wavepacket.hpp"

namespace tfa {

namespace {

double log_bracket(long long n) { return std::log2(2.0 + double(std::llabs(n))); }

// exact (1/|I|) int g chi~_{I+n|I|} for a step function g, in cell units;
// matches the closed form used by shifted_max
double weighted_avg_cells(const DyadicGridFn& g, double center_cell,
                          long long L) {
    long long clo = g.lo << g.J, chi = g.hi << g.J;
    double total = 0;
    double prev = std::asinh((double(clo) - center_cell) / double(L));
    for (long long p = clo; p < chi; ++p) {
        double cur = std::asinh((double(p + 1) - center_cell) / double(L));
        total += g.values[std::size_t(p - clo)] * (cur - prev);
        prev = cur;
    }
    return total;
}

void check_same_grid(const DyadicGridFn& a, const DyadicGridFn& b,
                     const char* who) {
    if (a.J != b.J)
        throw std::invalid_argument(std::string(who) + ": grid depth mismatch");
}

} // namespace

DyadicGridFn random_grid_set(Rng& rng, int J, long long lo, long long hi,
                             int max_parts) {
    DyadicGridFn out;
    out.J = J;
    out.lo = lo;
    out.hi = hi;
    out.values.assign(std::size_t(out.cells()), 0);
    long long n = out.cells();
    int parts = int(rng.uniform_int(1, max_parts));
    for (int k = 0; k < parts; ++k) {
        long long a = rng.uniform_int(0, n - 1);
        long long b = std::min(n, a + 1 + rng.uniform_int(0, n / 4));
        for (long long c = a; c < b; ++c) out.values[std::size_t(c)] = 1;
    }
    return out;
}

double set_measure(const DyadicGridFn& indicator) {
    double s = 0;
    for (double v : indicator.values) s += v;
    return std::ldexp(s, -indicator.J);
}

DyadicGridFn set_difference(const DyadicGridFn& a, const DyadicGridFn& omega) {
    check_same_grid(a, omega, "set_difference");
    DyadicGridFn out = a;
    long long base = a.lo << a.J;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (omega.at_cell(base + static_cast<long long>(i)) > 0) out.values[i] = 0;
    return out;
}

ExceptionalSet build_exceptional_set(const std::array<DyadicGridFn, 3>& E,
                                     const std::array<long long, 3>& shifts,
                                     double C_init) {
    for (const auto& e : E) {
        validate_grid_fn(e);
        check_same_grid(e, E[0], "build_exceptional_set");
        if (set_measure(e) <= 0)
            throw std::invalid_argument("build_exceptional_set: null set");
    }
    if (C_init <= 0)
        throw std::invalid_argument("build_exceptional_set: C must be > 0");

    int J = E[0].J;
    for (double C = C_init;; C *= 2) {
        if (C > 1e12)
            throw std::runtime_error("build_exceptional_set: C escalation ran away");
        // the superlevel set is a union of dyadic intervals; an interval can
        // only qualify when its length and the distance from the shifted
        // center to the support are both below 1/threshold (the cutoff is at
        // most 1 and at most |I| over the distance), so the enumeration is
        // pruned to that window with one extra cell of slack
        std::vector<std::pair<long long, long long>> hits;
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& e = E[j];
            double mass = set_measure(e);
            DyadicGridFn g = e;
            for (auto& v : g.values) v /= mass;
            double t = C * log_bracket(shifts[j]);
            long long flo = e.lo << J, fhi = e.hi << J;
            double window = std::ldexp(1.0, J) / t + 1;
            for (int lvl = 0; lvl <= 2 * J; ++lvl) {
                long long L = 1LL << lvl;
                if (double(L) > window) break;
                long long slo = (long long)std::floor(
                    (double(flo) - window - double(shifts[j] * L)) / double(L) - 1);
                long long shi = (long long)std::ceil(
                    (double(fhi) + window - double(shifts[j] * L)) / double(L) + 1);
                for (long long m = slo; m <= shi; ++m) {
                    long long s = m * L;
                    double cc = double(s + shifts[j] * L) + 0.5 * double(L);
                    if (weighted_avg_cells(g, cc, L) > t)
                        hits.emplace_back(s, s + L);
                }
            }
        }
        ExceptionalSet out;
        out.C_used = C;
        long long dlo = 0, dhi = 0;
        for (auto [a, b] : hits) {
            dlo = std::min(dlo, a);
            dhi = std::max(dhi, b);
        }
        // align the carrier domain to whole units around the hits and the
        // sets themselves
        long long ulo = std::min(E[0].lo, dlo >> J);
        long long uhi = std::max(E[0].hi, (dhi >> J) + 1);
        out.omega.J = J;
        out.omega.lo = ulo;
        out.omega.hi = uhi;
        out.omega.values.assign(std::size_t(out.omega.cells()), 0);
        long long base = ulo << J;
        for (auto [a, b] : hits)
            for (long long c = a; c < b; ++c)
                out.omega.values[std::size_t(c - base)] = 1;
        out.measure = set_measure(out.omega);
        if (out.measure < 0.5) return out;
    }
}

std::map<int, std::vector<std::size_t>> partition_by_distance(
    const std::vector<QuadTile>& collection, const DyadicGridFn& omega) {
    std::map<int, std::vector<std::size_t>> out;
    int J = omega.J;
    long long clo = omega.lo << J, chi = omega.hi << J;
    for (std::size_t i = 0; i < collection.size(); ++i) {
        RatInterval I = collection[i].I();
        double a = std::ldexp(to_double(I.lo), J);   // in cell units
        double b = std::ldexp(to_double(I.hi), J);
        // positive-length overlap with a vacant cell or with the outside of
        // the carrier puts the tile in stratum 0
        bool meets_complement = a < double(clo) || b > double(chi);
        long long first = (long long)std::floor(a), last = (long long)std::ceil(b);
        for (long long c = std::max(first, clo); c < std::min(last, chi); ++c)
            if (omega.at_cell(c) == 0 &&
                std::min(b, double(c + 1)) - std::max(a, double(c)) > 0)
                meets_complement = true;
        if (meets_complement) {
            out[0].push_back(i);
            continue;
        }
        double dist_left = a - double(clo), dist_right = double(chi) - b;
        for (long long c = first - 1; c >= clo; --c)
            if (omega.at_cell(c) == 0) {
                dist_left = a - double(c + 1);
                break;
            }
        for (long long c = last; c < chi; ++c)
            if (omega.at_cell(c) == 0) {
                dist_right = double(c) - b;
                break;
            }
        double ratio = std::min(dist_left, dist_right) / (b - a);
        int d = ratio <= 1 ? 1 : int(std::ceil(std::log2(ratio)));
        out[d].push_back(i);
    }
    return out;
}

RwtReport rwt_run(const ExperimentConfig& cfg,
                  const std::vector<QuadTile>& collection,
                  const std::array<DyadicGridFn, 3>& E,
                  const DyadicGridFn& E4) {
    auto [g1, g2, g3] = cfg.gammas;
    if (!(g1 > 0 && g1 < 1) || !(g3 > 0 && g3 < 1) || !(g2 > 0 && g2 < 0.5))
        throw std::invalid_argument("rwt_run: gammas out of range");

    RwtReport rep;
    auto exc = build_exceptional_set(E, cfg.shifts, cfg.C_init);
    rep.omega_measure = exc.measure;
    rep.C_used = exc.C_used;
    rep.e4_measure = set_measure(E4);
    DyadicGridFn e4p = set_difference(E4, exc.omega);
    rep.e4_prime_measure = set_measure(e4p);
    if (rep.e4_prime_measure <= 0)
        throw std::invalid_argument("rwt_run: E4 lost to the exceptional set");

    // indicator samples over one period; the quadrature in the packet
    // pairings sees their periodic extensions
    Rng phase_rng = Rng::derive(cfg.seed, 77);
    std::array<SampledFunction, 4> fs;
    for (int j = 0; j < 4; ++j) {
        const DyadicGridFn& src = j < 3 ? E[std::size_t(j)] : e4p;
        if (src.lo != 0)
            throw std::invalid_argument("rwt_run: sets must start at 0");
        fs[std::size_t(j)].period = double(src.hi - src.lo);
        for (double v : src.values) {
            Cplx c(v, 0);
            if (cfg.random_phases && j < 3 && v != 0) {
                double th = phase_rng.uniform(0, 2 * M_PI);
                c *= Cplx(std::cos(th), std::sin(th));
            }
            fs[std::size_t(j)].values.push_back(c);
        }
    }
    for (int j = 0; j < 3; ++j)
        rep.set_measures[std::size_t(j)] = set_measure(E[std::size_t(j)]);

    auto strata = partition_by_distance(collection, exc.omega);
    std::vector<Cplx> terms(collection.size());
    for (std::size_t i = 0; i < collection.size(); ++i) {
        const auto& qt = collection[i];
        Cplx term{1, 0};
        for (int jj = 1; jj <= 4; ++jj) {
            int shift = jj == 4 ? 0 : int(cfg.shifts[std::size_t(jj - 1)]);
            term *= inner_product(fs[std::size_t(jj - 1)],
                                  make_wave_packet(qt.tile(jj), 2.0, shift));
        }
        terms[i] = term / to_double(qt.I().length());
        rep.total += terms[i];
    }
    Cplx recombined{};
    for (const auto& [d, members] : strata) {
        Cplx s{};
        for (std::size_t i : members) s += terms[i];
        rep.stratum_sums[d] = s;
        recombined += s;
    }
    rep.recombine_error = std::abs(recombined - rep.total);

    double g4 = 1 - g1 - g2 - g3;
    rep.envelope = std::pow(rep.set_measures[0], g1) *
                   std::pow(rep.set_measures[1], g2) *
                   std::pow(rep.set_measures[2], g3) *
                   std::pow(rep.e4_measure, g4);
    for (long long n : cfg.shifts) rep.envelope *= std::pow(log_bracket(n), 4);
    rep.bound_ratio = std::abs(rep.total) / rep.envelope;
    return rep;
}

RwtReport rwt_experiment(const ExperimentConfig& cfg) {
    std::vector<QuadTile> collection;
    for (std::uint64_t s = 0; collection.size() < cfg.tile_count && s < 64; ++s) {
        auto coll = generate_case_collection(int(s % 3) + 1, cfg.beta,
                                             cfg.scale_lo, cfg.scale_hi, 2,
                                             cfg.seed + s);
        collection.insert(collection.end(), coll.quadtiles.begin(),
                          coll.quadtiles.end());
    }
    if (collection.size() < cfg.tile_count)
        throw std::runtime_error("rwt_experiment: collection generation fell short");
    collection.resize(cfg.tile_count);

    Rng rng = Rng::derive(cfg.seed, 11);
    std::array<DyadicGridFn, 3> E;
    for (auto& e : E) {
        e = random_grid_set(rng, cfg.grid_J, 0, cfg.period, cfg.set_parts);
        if (set_measure(e) <= 0) e.values[0] = 1;
    }
    // the fourth set is normalized to measure one
    DyadicGridFn E4;
    E4.J = cfg.grid_J;
    E4.lo = 0;
    E4.hi = cfg.period;
    E4.values.assign(std::size_t(E4.cells()), 0);
    for (long long c = 0; c < (1LL << cfg.grid_J); ++c)
        E4.values[std::size_t(c)] = 1;
    return rwt_run(cfg, collection, E, E4);
}

std::string rwt_json(const ExperimentConfig& cfg, const RwtReport& rep) {
    nlohmann::json j;
    j["config"] = {{"seed", cfg.seed},
                   {"beta", cfg.beta},
                   {"scale_lo", cfg.scale_lo},
                   {"scale_hi", cfg.scale_hi},
                   {"tile_count", cfg.tile_count},
                   {"shifts", cfg.shifts},
                   {"gammas", cfg.gammas},
                   {"C_init", cfg.C_init},
                   {"grid_J", cfg.grid_J},
                   {"period", cfg.period},
                   {"random_phases", cfg.random_phases}};
    j["omega_measure"] = rep.omega_measure;
    j["C_used"] = rep.C_used;
    j["e4_measure"] = rep.e4_measure;
    j["e4_prime_measure"] = rep.e4_prime_measure;
    j["set_measures"] = rep.set_measures;
    j["total_abs"] = std::abs(rep.total);
    j["recombine_error"] = rep.recombine_error;
    j["envelope"] = rep.envelope;
    j["bound_ratio"] = rep.bound_ratio;
    auto strata = nlohmann::json::array();
    for (const auto& [d, s] : rep.stratum_sums)
        strata.push_back({{"d", d}, {"abs_sum", std::abs(s)}});
    j["strata"] = strata;
    return j.dump(2);
}

} // namespace tfa
