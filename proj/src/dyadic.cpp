#include "tfa/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace tfa {

namespace {

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

long long floor_rat(const Rat& x) {
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);  // > 0
    BigInt q = num / den, r = num % den;
    if (r != 0 && num < 0) --q;
    return q.convert_to<long long>();
}

Rat rat_from_double(double x) {
    if (x == 0) return Rat(0);
    int e = 0;
    double m = std::frexp(x, &e);  // x = m 2^e, |m| in [1/2, 1)
    auto num = BigInt(static_cast<long long>(std::ldexp(m, 53)));
    return Rat(num) * pow2(e - 53);
}

} // namespace

RatInterval MeshInterval::realize() const { return mesh_interval(j, k, sigma3); }

RatInterval mesh_interval(int j, long long k, int sigma3) {
    if (sigma3 < 0 || sigma3 > 2) throw std::invalid_argument("mesh_interval: sigma");
    Rat s = Rat(sigma3, 3);
    if (j % 2 != 0) s = -s;  // the (-1)^j factor on the shift
    Rat scale = pow2(j);
    return {scale * (Rat(k) + s), scale * (Rat(k) + 1 + s)};
}

namespace {

// Interval of D^1_sigma at the given scale whose (7/10)-dilate contains q,
// if one exists.
std::optional<MeshInterval> enclose_at_scale(const RatInterval& q, int j) {
    Rat c = q.center(), scale = pow2(j);
    for (int sig = 0; sig < 3; ++sig) {
        Rat s = Rat(sig, 3);
        if (j % 2 != 0) s = -s;
        long long k0 = floor_rat(c / scale - s);
        for (long long k = k0 - 1; k <= k0 + 1; ++k) {
            MeshInterval m{j, k, sig};
            if (m.realize().dilate(Rat(7, 10)).contains(q)) return m;
        }
    }
    return std::nullopt;
}

} // namespace

ShiftedCube find_enclosing_shifted_cube(const std::vector<RatInterval>& Q) {
    if (Q.empty() || Q.size() > 4) throw std::invalid_argument("enclosing cube: dimension");
    Rat len = Q[0].length();
    if (len == 0) throw std::invalid_argument("enclosing cube: degenerate input");
    for (const auto& side : Q)
        if (side.length() != len) throw std::invalid_argument("enclosing cube: sides differ");

    // Smallest scale whose 7/10 core can hold a side at all, then a few
    // adjacent scales; the shift structure guarantees success within them.
    int j = int(std::floor(std::log2(to_double(len)))) - 1;
    while (Rat(7) * pow2(j) <= Rat(10) * len) ++j;
    for (int attempt = 0; attempt < 4; ++attempt, ++j) {
        ShiftedCube cube;
        cube.j = j;
        bool ok = true;
        for (const auto& side : Q) {
            auto m = enclose_at_scale(side, j);
            if (!m) { ok = false; break; }
            cube.k.push_back(m->k);
            cube.sigma3.push_back(m->sigma3);
        }
        if (ok) return cube;
    }
    throw std::runtime_error("find_enclosing_shifted_cube: no cube found");
}

// Both clauses reduce to integer comparisons: volumes scale like (2^j)^n, so
// |10^9 Q| < |Q'| is 10^9 2^j < 2^j', i.e. a scale gap of at least 30; equal
// scale cubes have 10^9-dilates with centers 2^j |dk| apart and half-width
// (10^9/2) 2^j each, so they are disjoint (half-open) iff |dk| >= 10^9 in
// some axis. A doctest cross-checks this against the rational dilates.
bool is_sparse_pair(const ShiftedCube& a, const ShiftedCube& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("is_sparse_pair: dimension");
    if (a.j != b.j) return std::abs(a.j - b.j) >= 30;
    for (std::size_t d = 0; d < a.dim(); ++d) {
        long long dk = a.k[d] - b.k[d];
        if (dk >= 1000000000LL || dk <= -1000000000LL) return true;
    }
    return false;
}

bool is_sparse(const std::vector<ShiftedCube>& cubes) {
    for (std::size_t i = 1; i < cubes.size(); ++i)
        if (!cubes[i].same_shift(cubes[0]))
            throw std::invalid_argument("is_sparse: mixed shifts");
    for (std::size_t i = 0; i < cubes.size(); ++i)
        for (std::size_t j = i + 1; j < cubes.size(); ++j) {
            if (cubes[i] == cubes[j]) continue;
            if (!is_sparse_pair(cubes[i], cubes[j])) return false;
        }
    return true;
}

std::vector<std::vector<ShiftedCube>> split_sparse(
    const std::vector<ShiftedCube>& cubes) {
    for (std::size_t i = 1; i < cubes.size(); ++i)
        if (!cubes[i].same_shift(cubes[0]))
            throw std::invalid_argument("split_sparse: mixed shifts");

    std::vector<ShiftedCube> sorted = cubes;
    std::sort(sorted.begin(), sorted.end(), [](const ShiftedCube& a, const ShiftedCube& b) {
        return std::tie(a.j, a.k) < std::tie(b.j, b.k);
    });

    struct Part {
        std::map<int, std::vector<std::size_t>> by_scale;  // scale -> member index
        std::vector<ShiftedCube> members;
    };
    std::vector<Part> parts;
    for (const auto& c : sorted) {
        bool placed = false;
        for (auto& part : parts) {
            bool fits = true;
            for (const auto& [scale, idxs] : part.by_scale) {
                if (scale != c.j) {
                    if (std::abs(scale - c.j) < 30) { fits = false; break; }
                    continue;
                }
                for (std::size_t idx : idxs) {
                    const auto& other = part.members[idx];
                    if (other == c) continue;
                    if (!is_sparse_pair(c, other)) { fits = false; break; }
                }
                if (!fits) break;
            }
            if (fits) {
                part.by_scale[c.j].push_back(part.members.size());
                part.members.push_back(c);
                placed = true;
                break;
            }
        }
        if (!placed) {
            parts.emplace_back();
            parts.back().by_scale[c.j].push_back(0);
            parts.back().members.push_back(c);
        }
    }

    std::vector<std::vector<ShiftedCube>> out;
    out.reserve(parts.size());
    for (auto& p : parts) out.push_back(std::move(p.members));
    return out;
}

bool order_lt(const Tile& tp, const Tile& p) {
    return p.I().strictly_contains(tp.I()) &&
           tp.omega().dilate(5).contains(p.omega().dilate(5));
}

bool order_leq(const Tile& tp, const Tile& p) { return tp == p || order_lt(tp, p); }

bool order_lesssim(const Tile& tp, const Tile& p) {
    return p.I().contains(tp.I()) &&
           tp.omega().dilate(10000000).contains(p.omega().dilate(10000000));
}

bool order_lesssim_prime(const Tile& tp, const Tile& p) {
    return order_lesssim(tp, p) && !order_leq(tp, p);
}

namespace {

struct OrderedPairEval {
    bool viol1 = false, viol2 = false, viol3 = false;
    std::array<bool, 3> premise{};  // leq holds at tri slot
    std::array<bool, 4> lp{};       // lesssim' per position 1..4
    bool big_gap = false;           // 10^9 |I_{P'}| < |I_P|
};

// Realized intervals and their dilates for one quadtile, computed once. The
// certificate visits every ordered pair, and rebuilding these rationals per
// predicate call dominated its cost on large collections.
struct QtCache {
    RatInterval I;
    Rat len;
    std::array<RatInterval, 4> omega, w5, w7;
};

QtCache make_qt_cache(const QuadTile& q) {
    QtCache c;
    c.I = q.I();
    c.len = c.I.length();
    for (int pos = 1; pos <= 4; ++pos) {
        RatInterval w = q.tile(pos).omega();
        c.omega[std::size_t(pos - 1)] = w;
        c.w5[std::size_t(pos - 1)] = w.dilate(5);
        c.w7[std::size_t(pos - 1)] = w.dilate(10000000);
    }
    return c;
}

OrderedPairEval eval_ordered(const QuadTile& a, const QuadTile& b,
                             const QtCache& ca, const QtCache& cb,
                             const RankPartition& part) {
    OrderedPairEval ev;
    for (int slot = 0; slot < 3; ++slot) {
        int pos = part.tri[std::size_t(slot)];
        if (a.tile(pos) == b.tile(pos)) ev.viol1 = true;
    }
    // time intervals have no shift, so realized equality is mesh equality
    if (a.time == b.time && !(a.tile(part.para) == b.tile(part.para)))
        ev.viol1 = true;

    // every premise needs b's time interval to contain a's (strictly, or the
    // tiles coincide); checking that once skips the rational-heavy order
    // predicates for the bulk of the pairs
    bool time_eq = a.time == b.time;
    bool time_strict = cb.I.strictly_contains(ca.I);
    if (!(time_eq || time_strict)) return ev;

    auto leq = [&](int pos) {
        std::size_t s = std::size_t(pos - 1);
        return a.tile(pos) == b.tile(pos) ||
               (time_strict && ca.w5[s].contains(cb.w5[s]));
    };
    for (int slot = 0; slot < 3; ++slot)
        ev.premise[std::size_t(slot)] = leq(part.tri[std::size_t(slot)]);
    bool any = ev.premise[0] || ev.premise[1] || ev.premise[2];
    if (!any) return ev;

    bool time_contained = time_eq || time_strict;
    for (int pos = 1; pos <= 4; ++pos) {
        std::size_t s = std::size_t(pos - 1);
        bool ls = time_contained && (pos == part.para ||
                                     ca.w7[s].contains(cb.w7[s]));
        if (!ls) ev.viol2 = true;
        ev.lp[s] = pos == part.para
                       ? time_contained && !ca.omega[s].overlaps(cb.omega[s])
                       : ls && !leq(pos);
    }

    ev.big_gap = Rat(1000000000) * ca.len < cb.len;
    if (ev.big_gap) {
        for (int slot = 0; slot < 3; ++slot) {
            if (!ev.premise[std::size_t(slot)]) continue;
            int count = 0;
            for (int pos = 1; pos <= 4; ++pos)
                if (pos != part.tri[std::size_t(slot)] && ev.lp[std::size_t(pos - 1)]) ++count;
            if (count < 2) ev.viol3 = true;
        }
    }
    return ev;
}

OrderedPairEval eval_ordered(const QuadTile& a, const QuadTile& b,
                             const RankPartition& part) {
    return eval_ordered(a, b, make_qt_cache(a), make_qt_cache(b), part);
}

bool pair_clean(const QuadTile& a, const QuadTile& b, const RankPartition& part) {
    auto e1 = eval_ordered(a, b, part);
    auto e2 = eval_ordered(b, a, part);
    return !e1.viol1 && !e1.viol2 && !e1.viol3 && !e2.viol1 && !e2.viol2 && !e2.viol3;
}

} // namespace

Rank10Report rank10_check(const std::vector<QuadTile>& collection,
                          const RankPartition& part) {
    Rank10Report rep;
    std::array<bool, 3> seeded{};
    for (int slot = 0; slot < 3; ++slot)
        for (int pos = 1; pos <= 4; ++pos)
            if (pos != part.tri[std::size_t(slot)])
                rep.good_indices[std::size_t(slot)].insert(pos);

    std::vector<QtCache> cache;
    cache.reserve(collection.size());
    for (const auto& qt : collection) cache.push_back(make_qt_cache(qt));

    for (std::size_t i = 0; i < collection.size(); ++i)
        for (std::size_t j = 0; j < collection.size(); ++j) {
            if (i == j || collection[i] == collection[j]) continue;
            auto ev = eval_ordered(collection[i], collection[j], cache[i],
                                   cache[j], part);
            if (ev.viol1) rep.violations.push_back({i, j, 1});
            if (ev.viol2) rep.violations.push_back({i, j, 2});
            if (ev.viol3) rep.violations.push_back({i, j, 3});
            if (ev.big_gap) {
                for (int slot = 0; slot < 3; ++slot) {
                    if (!ev.premise[std::size_t(slot)]) continue;
                    std::set<int> taus;
                    for (int pos = 1; pos <= 4; ++pos)
                        if (pos != part.tri[std::size_t(slot)] && ev.lp[std::size_t(pos - 1)])
                            taus.insert(pos);
                    auto& g = rep.good_indices[std::size_t(slot)];
                    if (!seeded[std::size_t(slot)]) {
                        g = taus;
                        seeded[std::size_t(slot)] = true;
                    } else {
                        std::set<int> inter;
                        std::set_intersection(g.begin(), g.end(), taus.begin(), taus.end(),
                                              std::inserter(inter, inter.begin()));
                        g = inter;
                    }
                }
            }
        }
    rep.ok = rep.violations.empty();
    return rep;
}

namespace {

// The frequency interval keeps clear of the origin even after 5-dilation,
// with a quarter-length margin. Across a sparseness-scale gap the partner's
// whole frequency support lives inside that margin, so the certificate
// settles lesssim' (and blocks leq) for every such pair at this position.
bool away_cert5(const RatInterval& omega) {
    RatInterval d = omega.dilate(5);
    Rat clearance = d.lo > 0 ? d.lo : (d.hi < 0 ? Rat(-d.hi) : Rat(0));
    return clearance >= omega.length() / 4;
}

// Weaker form for the paraproduct slot: the interval itself avoids the
// origin, which gives frequency disjointness against partners far down in
// scale.
bool away_cert1(const RatInterval& omega) {
    Rat clearance = omega.lo > 0 ? omega.lo : (omega.hi < 0 ? Rat(-omega.hi) : Rat(0));
    return clearance >= omega.length() / 4;
}

struct FreqPair {
    MeshInterval w2, w3;
};

// All scale-k shifted dyadic pairs (omega_2, omega_3) compatible with the
// requested region geometry, in a bounded index window.
std::vector<FreqPair> admissible_pairs(int case_id, int k, const Rat& beta) {
    std::vector<FreqPair> out;
    Rat L = pow2(k);
    for (int s2 = 0; s2 < 3; ++s2)
        for (long long m2 = -12; m2 <= 12; ++m2) {
            MeshInterval w2{k, m2, s2};
            RatInterval i2 = w2.realize();
            for (int s3 = 0; s3 < 3; ++s3)
                for (long long m3 = -12; m3 <= 12; ++m3) {
                    MeshInterval w3{k, m3, s3};
                    RatInterval i3 = w3.realize();
                    Rat strip = rat_abs(beta * i2.center() + i3.center());
                    if (case_id == 1) {
                        if (i2.overlaps(i3) && strip <= L) out.push_back({w2, w3});
                    } else {
                        // case 2 keeps beta xi2 + xi3 far enough out that the
                        // supports clear both kink planes of the averaged
                        // symbol (the position-1 support stays within one
                        // unit of the origin), making the integrand smooth
                        Rat lo = case_id == 2 ? Rat(23, 10) * L : L;
                        if (!i2.overlaps(i3) && strip >= lo && strip <= 3 * L &&
                            dist(i2, i3) <= 30 * L && away_cert5(i2) && away_cert5(i3))
                            out.push_back({w2, w3});
                    }
                }
        }
    return out;
}

MeshInterval fourth_interval(const MeshInterval& w1, const MeshInterval& w2,
                             const MeshInterval& w3) {
    RatInterval i1 = w1.realize(), i2 = w2.realize(), i3 = w3.realize();
    Rat nine(9, 10);
    RatInterval sum{nine * (i1.lo + i2.lo + i3.lo), nine * (i1.hi + i2.hi + i3.hi)};
    RatInterval neg{-sum.hi, -sum.lo};
    // Fixed at three scales up so |omega_4| is uniform across one scale:
    // 0.7 * 8 = 5.6 side lengths of core against 0.9 * 3 = 2.7 of content,
    // and the three shifts space candidate centers densely enough that the
    // search cannot fail.
    auto m = enclose_at_scale(neg, w1.j + 3);
    if (!m) throw std::runtime_error("fourth_interval: enclosure failed");
    return *m;
}

} // namespace

CaseCollection generate_case_collection(int case_id, double beta, int kmin,
                                        int kmax, int positions,
                                        std::uint64_t seed) {
    if (case_id < 1 || case_id > 3) throw std::invalid_argument("case id");
    if (beta == 0.0 || beta == 1.0) throw std::invalid_argument("beta in {0,1}");
    if (kmax < kmin || kmax - kmin > 60) throw std::invalid_argument("scale range");
    if (positions < 1) throw std::invalid_argument("positions");
    Rat rbeta = rat_from_double(beta);

    std::vector<QuadTile> all;
    for (int k = kmin; k <= kmax; ++k) {
        Rng rng = Rng::derive(seed, std::uint64_t(case_id) * 1000003u +
                                        std::uint64_t(k - kmin));
        auto pairs = admissible_pairs(case_id, k, rbeta);
        if (pairs.empty()) throw std::runtime_error("no admissible frequency pairs");

        // The scale fixes omega_1: one draw per scale, so quadtiles sharing a
        // time interval share their position-1 tile.
        MeshInterval w1;
        if (case_id == 2) {
            std::vector<MeshInterval> lows;
            for (long long m = -1; m <= 0; ++m)
                for (int s = 0; s < 3; ++s) {
                    MeshInterval cand{k, m, s};
                    if (rat_abs(cand.realize().center()) <= Rat(3, 5) * pow2(k))
                        lows.push_back(cand);
                }
            w1 = lows[std::size_t(rng.uniform_int(0, std::int64_t(lows.size()) - 1))];
        } else if (case_id == 3) {
            static const long long away[4] = {-3, -2, 1, 2};
            w1 = MeshInterval{k, away[rng.uniform_int(0, 3)], int(rng.uniform_int(0, 2))};
            if (!away_cert1(w1.realize())) w1.k = 2;
        } else {
            // Far enough out that omega_4 (length 8 * 2^k, centered near
            // -0.9 c_1) passes the dilated certificate as well.
            long long mag = 30 + rng.uniform_int(0, 4);
            w1 = MeshInterval{k, rng.coin() ? mag : -mag - 1, int(rng.uniform_int(0, 2))};
        }

        long long slots = 1LL << std::min(kmax - kmin, 40);
        slots = std::min(slots, 1LL << std::min(k - kmin, 40));
        int want = int(std::min<long long>(positions, slots));
        std::set<long long> taken;
        int guard = 10 * want + 100;
        while (int(taken.size()) < want && guard-- > 0)
            taken.insert(rng.uniform_int(0, slots - 1));
        for (long long t = 0; int(taken.size()) < want; ++t) taken.insert(t);

        for (long long mt : taken) {
            QuadTile qt;
            qt.time = MeshInterval{-k, mt, 0};
            qt.freq[0] = w1;
            bool built = false;
            for (int attempt = 0; attempt < 60 && !built; ++attempt) {
                const auto& fp = pairs[std::size_t(
                    rng.uniform_int(0, std::int64_t(pairs.size()) - 1))];
                qt.freq[1] = fp.w2;
                qt.freq[2] = fp.w3;
                qt.freq[3] = fourth_interval(qt.freq[0], qt.freq[1], qt.freq[2]);
                built = case_id != 1 || away_cert5(qt.freq[3].realize());
            }
            if (built) all.push_back(qt);
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    CaseCollection out;
    out.case_id = case_id;
    RankPartition part;
    auto rep = rank10_check(all, part);
    if (rep.ok) {
        out.quadtiles = std::move(all);
        out.refinement_parts = 1;
        return out;
    }

    // Finite refinement: first-fit coloring on the violation graph, keeping
    // the largest clean part.
    std::vector<std::vector<QuadTile>> parts_list;
    for (const auto& qt : all) {
        bool placed = false;
        for (auto& p : parts_list) {
            bool fits = true;
            for (const auto& other : p)
                if (!pair_clean(qt, other, part)) { fits = false; break; }
            if (fits) { p.push_back(qt); placed = true; break; }
        }
        if (!placed) parts_list.push_back({qt});
    }
    auto best = std::max_element(parts_list.begin(), parts_list.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); });
    out.quadtiles = *best;
    out.refinement_parts = int(parts_list.size());
    return out;
}

} // namespace tfa
