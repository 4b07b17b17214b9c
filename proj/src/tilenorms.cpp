#include "tfa/tilenorms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "tfa/wavepacket.hpp"

namespace tfa {

namespace {

double interval_len(const RatInterval& I) { return to_double(I.length()); }

// Cached geometry of one collection: the rank certificate's good-index sets
// and the position-wise tile order as boolean matrices. The order predicates
// compare exact rationals, so a 200-tile stratification would otherwise spend
// nearly all of its time re-deciding the same containments.
struct Ctx {
    const std::vector<QuadTile>& coll;
    std::array<std::set<int>, 3> good;
    // leq[i-2][t][p]: tile i of quadtile p sits below tile i of quadtile t
    std::array<std::vector<std::vector<char>>, 3> leq;

    explicit Ctx(const std::vector<QuadTile>& c)
        : coll(c), good(rank10_check(c).good_indices) {
        std::size_t n = c.size();
        // realize each tile's time interval and 5-dilated frequency support
        // once; the pairwise loop then only compares cached rationals
        std::vector<RatInterval> I(n);
        for (std::size_t p = 0; p < n; ++p) I[p] = c[p].I();
        for (int i = 2; i <= 4; ++i) {
            std::vector<RatInterval> w5(n);
            for (std::size_t p = 0; p < n; ++p)
                w5[p] = c[p].tile(i).omega().dilate(5);
            auto& m = leq[std::size_t(i - 2)];
            m.assign(n, std::vector<char>(n, 0));
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t p = 0; p < n; ++p)
                    m[t][p] = c[p].tile(i) == c[t].tile(i) ||
                              (I[t].strictly_contains(I[p]) &&
                               w5[p].contains(w5[t]));
        }
    }

    bool below(std::size_t p, std::size_t t, int i) const {
        return leq[std::size_t(i - 2)][t][p];
    }
};

std::vector<std::size_t> maximal_members(const Ctx& ctx,
                                         const std::vector<std::size_t>& pool,
                                         std::size_t top, int i) {
    std::vector<std::size_t> out;
    for (std::size_t p : pool)
        if (ctx.below(p, top, i)) out.push_back(p);
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

// squared coefficient magnitudes indexed by quadtile; hoisting them out of
// the map avoids a lookup per member in every tree sum
std::vector<double> mass_vector(const CoefficientSequence& coeffs,
                                std::size_t n, int j) {
    std::vector<double> m(n);
    for (std::size_t p = 0; p < n; ++p) m[p] = std::norm(coeffs.at(p, j));
    return m;
}

double tree_mass(const std::vector<double>& mass, const Tree& t) {
    double m = 0;
    for (std::size_t p : t.members) m += mass[p];
    return m;
}

double tree_size_value(const std::vector<double>& mass,
                       const std::vector<QuadTile>& coll, const Tree& t) {
    return std::sqrt(tree_mass(mass, t) / interval_len(coll[t.top].I()));
}

// size over an index pool; optionally reports the maximizing tree
double pool_size(const std::vector<double>& mass, const Ctx& ctx,
                 const std::vector<std::size_t>& pool, int j, Tree* argmax) {
    double best = 0;
    auto consider = [&](const Tree& t) {
        double v = tree_size_value(mass, ctx.coll, t);
        if (v > best) {
            best = v;
            if (argmax) *argmax = t;
        }
    };
    for (std::size_t p : pool) consider(Tree{p, 2, {p}});
    for (int i = 2; i <= 4; ++i) {
        if (!ctx.good[std::size_t(i - 2)].count(j)) continue;
        for (std::size_t t : pool)
            consider(Tree{t, i, maximal_members(ctx, pool, t, i)});
    }
    return best;
}

// Pairwise quadtile facts needed by strong disjointness at one position:
// equality of the position-j tiles, overlap of their 2-dilated frequency
// supports, and overlap of the time intervals (member vs candidate top).
struct PairCtx {
    std::vector<std::vector<char>> tile_eq, freq2_overlap, time_overlap;

    PairCtx(const std::vector<QuadTile>& coll, int j) {
        std::size_t n = coll.size();
        tile_eq.assign(n, std::vector<char>(n, 0));
        freq2_overlap = tile_eq;
        time_overlap = tile_eq;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                tile_eq[p][q] = coll[p].tile(j) == coll[q].tile(j);
                freq2_overlap[p][q] =
                    coll[p].tile(j).omega().dilate(Rat(2)).overlaps(
                        coll[q].tile(j).omega().dilate(Rat(2)));
                time_overlap[p][q] = coll[p].I().overlaps(coll[q].I());
            }
    }
};

bool pair_strongly_disjoint(const PairCtx& pc, const Tree& a, const Tree& b) {
    for (std::size_t p : a.members)
        for (std::size_t q : b.members) {
            if (pc.tile_eq[p][q]) return false;
            if (pc.freq2_overlap[p][q]) {
                if (pc.time_overlap[q][a.top]) return false;
                if (pc.time_overlap[p][b.top]) return false;
            }
        }
    return true;
}

} // namespace

Cplx CoefficientSequence::at(std::size_t p, int j) const {
    auto it = values.find({p, j});
    if (it == values.end())
        throw std::out_of_range("CoefficientSequence: missing coefficient");
    return it->second;
}

CoefficientSequence bind_coefficients(const BandlimitedFn& f,
                                      const std::vector<QuadTile>& collection,
                                      int j, int n_j) {
    CoefficientSequence out;
    auto arr = coefficient_array(f, collection, j, n_j);
    for (std::size_t p = 0; p < arr.size(); ++p) out.set(p, j, arr[p]);
    return out;
}

std::set<long long> friends_set(long long n) {
    if (n < 0) throw std::invalid_argument("friends_set: n must be nonnegative");
    std::set<long long> out;
    for (int k = 0; k < 63; ++k) {
        long long a = n >> k;
        long long b = ((1LL << k) - 1 + n) >> k;
        out.insert(a);
        out.insert(b);
        if (a == 0) break;
    }
    return out;
}

std::vector<Tree> enumerate_trees(const std::vector<QuadTile>& collection,
                                  int i, int good_for) {
    if (i < 2 || i > 4)
        throw std::invalid_argument("enumerate_trees: tree type must be 2..4");
    Ctx ctx(collection);
    auto pool = all_indices(collection.size());
    std::vector<Tree> out;
    for (std::size_t p : pool) out.push_back(Tree{p, i, {p}});
    bool keep_multi =
        good_for == 0 || ctx.good[std::size_t(i - 2)].count(good_for) > 0;
    if (keep_multi)
        for (std::size_t t : pool)
            out.push_back(Tree{t, i, maximal_members(ctx, pool, t, i)});
    return out;
}

double size_j(const CoefficientSequence& coeffs,
              const std::vector<QuadTile>& collection, int j) {
    if (collection.empty()) return 0;
    Ctx ctx(collection);
    auto mass = mass_vector(coeffs, collection.size(), j);
    return pool_size(mass, ctx, all_indices(collection.size()), j, nullptr);
}

double weak_l1_size(const CoefficientSequence& coeffs,
                    const std::vector<QuadTile>& collection, const Tree& tree,
                    int j) {
    RatInterval IT = collection[tree.top].I();
    // breakpoints of the piecewise-constant square function inside I_T
    std::vector<Rat> cuts{IT.lo, IT.hi};
    for (std::size_t p : tree.members) {
        RatInterval I = collection[p].I();
        if (I.lo > IT.lo && I.lo < IT.hi) cuts.push_back(I.lo);
        if (I.hi > IT.lo && I.hi < IT.hi) cuts.push_back(I.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    struct Seg {
        double value, length;
    };
    std::vector<Seg> segs;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        Rat mid = (cuts[s] + cuts[s + 1]) / 2;
        double v2 = 0;
        for (std::size_t p : tree.members) {
            RatInterval I = collection[p].I();
            if (I.lo <= mid && mid < I.hi)
                v2 += std::norm(coeffs.at(p, j)) / interval_len(I);
        }
        segs.push_back({std::sqrt(v2), to_double(cuts[s + 1] - cuts[s])});
    }
    std::sort(segs.begin(), segs.end(),
              [](const Seg& a, const Seg& b) { return a.value > b.value; });
    // sup_lambda lambda |{S > lambda}|, attained just below a segment value
    double weak = 0, cum = 0;
    for (const Seg& s : segs) {
        cum += s.length;
        weak = std::max(weak, s.value * cum);
    }
    return weak / interval_len(IT);
}

double john_nirenberg_check(const CoefficientSequence& coeffs,
                            const std::vector<QuadTile>& collection, int j) {
    double size = size_j(coeffs, collection, j);
    if (size == 0) return 1.0;
    Ctx ctx(collection);
    auto pool = all_indices(collection.size());
    double weak = 0;
    for (std::size_t p : pool)
        weak = std::max(weak,
                        weak_l1_size(coeffs, collection, Tree{p, 2, {p}}, j));
    for (int i = 2; i <= 4; ++i) {
        if (!ctx.good[std::size_t(i - 2)].count(j)) continue;
        for (std::size_t t : pool) {
            Tree tr{t, i, maximal_members(ctx, pool, t, i)};
            weak = std::max(weak, weak_l1_size(coeffs, collection, tr, j));
        }
    }
    return weak / size;
}

bool strongly_disjoint_check(const std::vector<Tree>& trees,
                             const std::vector<QuadTile>& collection, int j) {
    PairCtx pc(collection, j);
    for (std::size_t a = 0; a < trees.size(); ++a)
        for (std::size_t b = a + 1; b < trees.size(); ++b)
            if (!pair_strongly_disjoint(pc, trees[a], trees[b])) return false;
    return true;
}

namespace {

// shrink a candidate tree until every proper subtree obeys the level-(n+1)
// mass upper bound
Tree enforce_subtree_bound(const std::vector<double>& mass, const Ctx& ctx,
                           Tree t, int j, int n) {
    double cap = std::ldexp(1.0, 2 * (n + 1));
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t top2 : t.members) {
            if (top2 == t.top) continue;
            Tree sub{top2, j, maximal_members(ctx, t.members, top2, j)};
            // only strict shrinks make progress; mutually-below members give
            // a subtree equal to the whole tree, and such a violation is
            // unresolvable here (meets_bounds rejects the candidate)
            if (sub.members.size() < t.members.size() &&
                tree_mass(mass, sub) >
                    cap * interval_len(ctx.coll[top2].I()) + 1e-12) {
                t = sub;
                changed = true;
                break;
            }
        }
    }
    return t;
}

bool meets_bounds(const std::vector<double>& mass, const Ctx& ctx,
                  const Tree& t, int j, int n) {
    double low = std::ldexp(1.0, 2 * n) * interval_len(ctx.coll[t.top].I());
    if (tree_mass(mass, t) < low - 1e-12) return false;
    double cap = std::ldexp(1.0, 2 * (n + 1));
    for (std::size_t top2 : t.members) {
        Tree sub{top2, j, maximal_members(ctx, t.members, top2, j)};
        if (tree_mass(mass, sub) >
            cap * interval_len(ctx.coll[top2].I()) + 1e-12)
            return false;
    }
    return true;
}

bool wider_tree(const std::vector<QuadTile>& coll, const Tree& a, const Tree& b,
                int j) {
    // larger |I_T|, then leftmost in time, then lowest frequency; the index
    // tie-break makes this a total order so the greedy pick is unique
    Rat la = coll[a.top].I().length(), lb = coll[b.top].I().length();
    if (la != lb) return la > lb;
    Rat xa = coll[a.top].I().lo, xb = coll[b.top].I().lo;
    if (xa != xb) return xa < xb;
    Rat wa = coll[a.top].tile(j).omega().lo, wb = coll[b.top].tile(j).omega().lo;
    if (wa != wb) return wa < wb;
    return a.top < b.top;
}

double greedy_family_value(const std::vector<double>& mass, const Ctx& ctx,
                           const PairCtx& pc, int j, int n) {
    std::vector<std::size_t> remaining = all_indices(ctx.coll.size());
    // visit candidate tops widest-first so a round can stop as soon as the
    // untried tops are too short to beat the current pick
    std::sort(remaining.begin(), remaining.end(),
              [&](std::size_t a, std::size_t b) {
                  return wider_tree(ctx.coll, Tree{a, j, {}}, Tree{b, j, {}}, j);
              });
    std::vector<Tree> chosen;
    double sum_it = 0;
    while (true) {
        bool have = false;
        Tree best;
        for (std::size_t t : remaining) {
            if (have &&
                ctx.coll[t].I().length() < ctx.coll[best.top].I().length())
                break;
            Tree cand{t, j, maximal_members(ctx, remaining, t, j)};
            cand = enforce_subtree_bound(mass, ctx, cand, j, n);
            if (!meets_bounds(mass, ctx, cand, j, n)) continue;
            bool ok = true;
            for (const Tree& c : chosen)
                if (!pair_strongly_disjoint(pc, cand, c)) ok = false;
            if (!ok) continue;
            if (!have || wider_tree(ctx.coll, cand, best, j)) {
                best = cand;
                have = true;
            }
        }
        if (!have) break;
        chosen.push_back(best);
        sum_it += interval_len(ctx.coll[best.top].I());
        std::vector<std::size_t> next;
        for (std::size_t p : remaining)
            if (std::find(best.members.begin(), best.members.end(), p) ==
                best.members.end())
                next.push_back(p);
        remaining = next;
    }
    return std::ldexp(1.0, n) * std::sqrt(sum_it);
}

double exhaustive_family_value(const std::vector<double>& mass,
                               const Ctx& ctx, const PairCtx& pc, int j,
                               int n) {
    auto pool = all_indices(ctx.coll.size());
    std::vector<Tree> cands;
    for (std::size_t t : pool) {
        auto full = maximal_members(ctx, pool, t, j);
        if (full.size() > 16)
            throw std::invalid_argument("energy_j: exhaustive tree too large");
        for (unsigned mask = 1; mask < (1u << full.size()); ++mask) {
            Tree cand{t, j, {}};
            for (std::size_t b = 0; b < full.size(); ++b)
                if (mask & (1u << b)) cand.members.push_back(full[b]);
            if (meets_bounds(mass, ctx, cand, j, n)) cands.push_back(cand);
        }
        if (cands.size() > 8192)
            throw std::invalid_argument("energy_j: exhaustive candidate limit");
    }
    std::sort(cands.begin(), cands.end(), [&](const Tree& a, const Tree& b) {
        return interval_len(ctx.coll[a.top].I()) >
               interval_len(ctx.coll[b.top].I());
    });
    std::vector<double> suffix(cands.size() + 1, 0);
    for (std::size_t i = cands.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] + interval_len(ctx.coll[cands[i].top].I());

    double best = 0;
    std::vector<const Tree*> chosen;
    std::vector<char> used(ctx.coll.size(), 0);
    auto dfs = [&](auto&& self, std::size_t idx, double cur) -> void {
        best = std::max(best, cur);
        if (idx >= cands.size() || cur + suffix[idx] <= best) return;
        const Tree& c = cands[idx];
        bool ok = true;
        for (std::size_t p : c.members)
            if (used[p]) ok = false;
        if (ok)
            for (const Tree* t : chosen)
                if (!pair_strongly_disjoint(pc, *t, c)) ok = false;
        if (ok) {
            for (std::size_t p : c.members) used[p] = 1;
            chosen.push_back(&c);
            self(self, idx + 1, cur + interval_len(ctx.coll[c.top].I()));
            chosen.pop_back();
            for (std::size_t p : c.members) used[p] = 0;
        }
        self(self, idx + 1, cur);
    };
    dfs(dfs, 0, 0.0);
    return std::ldexp(1.0, n) * std::sqrt(best);
}

double energy_impl(const CoefficientSequence& coeffs, const Ctx& ctx, int j,
                   EnergyMode mode) {
    auto mass = mass_vector(coeffs, ctx.coll.size(), j);
    double rmin = 1e300, rmax = 0;
    for (std::size_t p = 0; p < ctx.coll.size(); ++p) {
        double r = std::sqrt(mass[p] / interval_len(ctx.coll[p].I()));
        if (r > 0) {
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
    }
    if (rmax == 0) return 0;
    PairCtx pc(ctx.coll, j);
    int nmax = int(std::ceil(std::log2(rmax)));
    // levels far below the top cannot win the sup: the 2^n prefactor falls
    // faster than the family's total length can grow, so near-underflow
    // coefficients must not drag the scan down a thousand levels
    int nmin = std::max(int(std::floor(std::log2(rmin))) - 2, nmax - 60);
    double best = 0;
    for (int n = nmin; n <= nmax; ++n) {
        double v = mode == EnergyMode::Greedy
                       ? greedy_family_value(mass, ctx, pc, j, n)
                       : exhaustive_family_value(mass, ctx, pc, j, n);
        best = std::max(best, v);
    }
    return best;
}

} // namespace

double energy_j(const CoefficientSequence& coeffs,
                const std::vector<QuadTile>& collection, int j,
                EnergyMode mode) {
    if (j < 2 || j > 4)
        throw std::invalid_argument("energy_j: position must be 2..4");
    if (mode == EnergyMode::Exhaustive && collection.size() > 12)
        throw std::invalid_argument(
            "energy_j: exhaustive mode limited to 12 quadtiles");
    if (collection.empty()) return 0;
    Ctx ctx(collection);
    return energy_impl(coeffs, ctx, j, mode);
}

Cplx lambda_form(const std::vector<QuadTile>& collection,
                 const BandlimitedFn& f1, const BandlimitedFn& f2,
                 const BandlimitedFn& f3, const BandlimitedFn& f4,
                 const std::array<int, 3>& shifts) {
    Cplx total{0, 0};
    const BandlimitedFn* fs[4] = {&f1, &f2, &f3, &f4};
    for (const auto& qt : collection) {
        Cplx term{1, 0};
        for (int jj = 1; jj <= 4; ++jj) {
            int shift = jj == 4 ? 0 : shifts[std::size_t(jj - 1)];
            term *= inner_product(*fs[jj - 1],
                                  make_wave_packet(qt.tile(jj), 2.0, shift));
        }
        total += term / interval_len(qt.I());
    }
    return total;
}

double single_tree_bound_check(const CoefficientSequence& coeffs,
                               const std::vector<QuadTile>& collection,
                               const Tree& tree) {
    double lhs = 0;
    for (std::size_t p : tree.members) {
        double prod = 1;
        for (int jj = 1; jj <= 4; ++jj) prod *= std::abs(coeffs.at(p, jj));
        lhs += prod / interval_len(collection[p].I());
    }
    Ctx ctx(collection);
    double rhs = interval_len(collection[tree.top].I());
    for (int jj = 1; jj <= 4; ++jj) {
        auto mass = mass_vector(coeffs, collection.size(), jj);
        double s = pool_size(mass, ctx, tree.members, jj, nullptr);
        // the tree itself is admissible when jj is good for its type (or it
        // is a singleton), even though its top may sit outside the members
        bool own = tree.members.size() <= 1 ||
                   ctx.good[std::size_t(tree.tree_type - 2)].count(jj) > 0;
        if (own) s = std::max(s, tree_size_value(mass, collection, tree));
        rhs *= s;
    }
    return rhs - lhs;
}

Stratification size_energy_decompose(const CoefficientSequence& coeffs,
                                     const std::vector<QuadTile>& collection,
                                     int j) {
    Stratification out;
    if (collection.empty()) {
        out.strata[0] = Stratum{};
        return out;
    }
    Ctx ctx(collection);
    auto mass = mass_vector(coeffs, collection.size(), j);
    out.total_size =
        pool_size(mass, ctx, all_indices(collection.size()), j, nullptr);
    out.total_energy = energy_impl(coeffs, ctx, j, EnergyMode::Greedy);
    if (out.total_size == 0 || out.total_energy == 0) {
        out.strata[0] = Stratum{};
        return out;
    }
    double E = out.total_energy;
    int n = int(std::floor(std::log2(E / out.total_size)));
    std::vector<std::size_t> remaining = all_indices(collection.size());
    std::size_t guard = 4 * collection.size() + 64;
    while (!remaining.empty()) {
        if (guard-- == 0)
            throw std::runtime_error("size_energy_decompose: no progress");
        Tree arg;
        double s = pool_size(mass, ctx, remaining, j, &arg);
        if (s <= std::ldexp(E, -n - 1)) {
            ++n;
            continue;
        }
        Stratum& st = out.strata[n];
        st.trees.push_back(arg);
        st.sum_it += interval_len(collection[arg.top].I());
        for (std::size_t p : arg.members) st.members.push_back(p);
        std::vector<std::size_t> next;
        for (std::size_t p : remaining)
            if (std::find(arg.members.begin(), arg.members.end(), p) ==
                arg.members.end())
                next.push_back(p);
        remaining = next;
    }
    for (auto& [level, st] : out.strata) {
        std::sort(st.members.begin(), st.members.end());
        st.size_bound = pool_size(mass, ctx, st.members, j, nullptr);
    }
    return out;
}

std::string stratification_json(const Stratification& s) {
    nlohmann::json root;
    root["total_size"] = s.total_size;
    root["total_energy"] = s.total_energy;
    root["strata"] = nlohmann::json::array();
    for (const auto& [n, st] : s.strata) {
        nlohmann::json item;
        item["n"] = n;
        item["size_bound"] = st.size_bound;
        item["tree_count"] = st.trees.size();
        item["sum_it"] = st.sum_it;
        item["ratio_4n"] = st.sum_it / std::ldexp(1.0, 2 * n);
        root["strata"].push_back(item);
    }
    return root.dump(2);
}

double size_energy_inequality_check(const std::vector<QuadTile>& collection,
                                    const BandlimitedFn& f1,
                                    const BandlimitedFn& f2,
                                    const BandlimitedFn& f3,
                                    const BandlimitedFn& f4,
                                    const std::array<int, 3>& shifts,
                                    const std::array<double, 3>& thetas) {
    double tsum = 0;
    for (double th : thetas) {
        if (th < 0 || th >= 1)
            throw std::invalid_argument("thetas must lie in [0,1)");
        tsum += th;
    }
    if (std::abs(tsum - 1.0) > 1e-9)
        throw std::invalid_argument("thetas must sum to 1");
    if (collection.empty()) return 0;

    const BandlimitedFn* fs[4] = {&f1, &f2, &f3, &f4};
    std::array<CoefficientSequence, 4> coeffs;
    for (int jj = 1; jj <= 4; ++jj)
        coeffs[std::size_t(jj - 1)] = bind_coefficients(
            *fs[jj - 1], collection, jj,
            jj == 4 ? 0 : shifts[std::size_t(jj - 1)]);

    Ctx ctx(collection);
    auto pool = all_indices(collection.size());
    double denom = pool_size(mass_vector(coeffs[0], collection.size(), 1), ctx,
                             pool, 1, nullptr);
    for (int jj = 2; jj <= 4; ++jj) {
        double s = pool_size(mass_vector(coeffs[std::size_t(jj - 1)],
                                         collection.size(), jj),
                             ctx, pool, jj, nullptr);
        double e = energy_impl(coeffs[std::size_t(jj - 1)], ctx, jj,
                               EnergyMode::Greedy);
        double th = thetas[std::size_t(jj - 2)];
        denom *= std::pow(s, th) * std::pow(e, 1.0 - th);
    }
    if (denom == 0) return 0;
    Cplx lam = lambda_form(collection, f1, f2, f3, f4, shifts);
    return std::abs(lam) / denom;
}

} // namespace tfa
