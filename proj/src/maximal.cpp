#include "tfa/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tfa/tilenorms.hpp"

namespace tfa {

namespace {

// All geometry below lives in finest-cell units: cell c is the real interval
// [c 2^{-J}, (c+1) 2^{-J}), and a dyadic interval at scale 2^k is a block of
// L = 2^{k+J} consecutive cells starting at a multiple of L.

long long floor_div(long long a, long long b) {
    long long q = a / b;
    return q * b > a ? q - 1 : q;
}

struct Grid {
    const DyadicGridFn& f;
    long long clo, chi;          // cell index range of the domain
    std::vector<double> prefix;  // prefix sums of the cell values

    explicit Grid(const DyadicGridFn& fn)
        : f(fn), clo(fn.lo << fn.J), chi(fn.hi << fn.J) {
        prefix.assign(std::size_t(chi - clo) + 1, 0);
        for (long long i = clo; i < chi; ++i)
            prefix[std::size_t(i - clo + 1)] =
                prefix[std::size_t(i - clo)] + f.values[std::size_t(i - clo)];
    }

    double cell_sum(long long a, long long b) const {
        a = std::max(a, clo);
        b = std::min(b, chi);
        if (a >= b) return 0;
        return prefix[std::size_t(b - clo)] - prefix[std::size_t(a - clo)];
    }
};

// average of f over the block of L cells starting at s
double block_avg(const Grid& g, long long s, long long L) {
    return g.cell_sum(s, s + L) / double(L);
}

// integral of f against the cutoff centered at cc cells with width L cells,
// divided by the interval length; one asinh per cell boundary
double weighted_avg(const Grid& g, double cc, long long L) {
    double total = 0;
    double prev = std::asinh((double(g.clo) - cc) / double(L));
    for (long long p = g.clo; p < g.chi; ++p) {
        double cur = std::asinh((double(p + 1) - cc) / double(L));
        total += g.f.values[std::size_t(p - g.clo)] * (cur - prev);
        prev = cur;
    }
    return total;
}

DyadicGridFn make_output(const DyadicGridFn& f, long long pad_left,
                         long long pad_right) {
    DyadicGridFn out;
    out.J = f.J;
    out.lo = f.lo - pad_left;
    out.hi = f.hi + pad_right;
    out.values.assign(std::size_t(out.cells()), 0);
    return out;
}

// sup over dyadic intervals of a per-interval average, written back as a
// range max over the interval's cells
template <class Avg>
DyadicGridFn sup_over_intervals(const DyadicGridFn& f, long long pad_left,
                                long long pad_right, Avg&& avg) {
    validate_grid_fn(f);
    Grid g(f);
    DyadicGridFn out = make_output(f, pad_left, pad_right);
    long long olo = out.lo << out.J, ohi = out.hi << out.J;
    for (int lvl = 0; lvl <= 2 * f.J; ++lvl) {
        long long L = 1LL << lvl;
        for (long long s = floor_div(olo, L) * L; s < ohi; s += L) {
            double v = avg(g, s, L);
            if (v <= 0) continue;
            for (long long c = std::max(s, olo); c < std::min(s + L, ohi); ++c)
                out.values[std::size_t(c - olo)] =
                    std::max(out.values[std::size_t(c - olo)], v);
        }
    }
    return out;
}

using IntervalList = std::vector<std::pair<long long, long long>>;

IntervalList merge(IntervalList v) {
    std::sort(v.begin(), v.end());
    IntervalList out;
    for (auto [a, b] : v) {
        if (a >= b) continue;
        if (!out.empty() && a <= out.back().second)
            out.back().second = std::max(out.back().second, b);
        else
            out.emplace_back(a, b);
    }
    return out;
}

long long total_length(const IntervalList& v) {
    long long t = 0;
    for (auto [a, b] : v) t += b - a;
    return t;
}

bool subset_of(const IntervalList& inner, const IntervalList& outer) {
    for (auto [a, b] : inner) {
        auto it = std::upper_bound(outer.begin(), outer.end(),
                                   std::make_pair(a, std::numeric_limits<long long>::max()));
        if (it == outer.begin()) return false;
        --it;
        if (it->first > a || it->second < b) return false;
    }
    return true;
}

// dyadic intervals K intersecting the support of f with average > lambda;
// shift_blocks translates each hit by that many multiples of its own length
IntervalList superlevel_intervals(const Grid& g, double lambda,
                                  long long shift_blocks) {
    IntervalList out;
    for (int lvl = 0; lvl <= 2 * g.f.J; ++lvl) {
        long long L = 1LL << lvl;
        for (long long s = floor_div(g.clo, L) * L; s < g.chi; s += L)
            if (block_avg(g, s, L) > lambda)
                out.emplace_back(s + shift_blocks * L,
                                 s + (shift_blocks + 1) * L);
    }
    return merge(out);
}

} // namespace

double DyadicGridFn::at_cell(long long cell) const {
    long long c = cell - (lo << J);
    if (c < 0 || c >= cells()) return 0;
    return values[std::size_t(c)];
}

void validate_grid_fn(const DyadicGridFn& f) {
    if (f.J < 0 || f.J > 30)
        throw std::invalid_argument("grid fn: J must be in [0, 30]");
    if (f.hi <= f.lo) throw std::invalid_argument("grid fn: empty domain");
    if (static_cast<long long>(f.values.size()) != f.cells())
        throw std::invalid_argument("grid fn: value count mismatch");
    for (double v : f.values)
        if (!(v >= 0)) throw std::invalid_argument("grid fn: negative value");
}

DyadicGridFn hl_max(const DyadicGridFn& f) {
    long long pad = 1LL << f.J;
    return sup_over_intervals(f, pad, pad, block_avg);
}

DyadicGridFn shifted_max(const DyadicGridFn& f, long long n) {
    long long pad = 1LL << f.J;
    return sup_over_intervals(
        f, (std::max(n, 0LL) + 2) * pad, (std::max(-n, 0LL) + 2) * pad,
        [n](const Grid& g, long long s, long long L) {
            return weighted_avg(g, double(s + n * L) + 0.5 * double(L), L);
        });
}

DyadicGridFn sharp_shifted_max(const DyadicGridFn& f, long long n) {
    long long pad = 1LL << f.J;
    return sup_over_intervals(
        f, (std::max(n, 0LL) + 2) * pad, (std::max(-n, 0LL) + 2) * pad,
        [n](const Grid& g, long long s, long long L) {
            return block_avg(g, s + n * L, L);
        });
}

WeakTypeReport weak_type_test(const DyadicGridFn& f, long long n,
                              const std::vector<double>& lambdas) {
    validate_grid_fn(f);
    for (double lambda : lambdas)
        if (!(lambda > 0))
            throw std::invalid_argument("weak_type_test: lambda must be > 0");
    Grid g(f);
    double cell = std::ldexp(1.0, -f.J);
    WeakTypeReport rep;
    bool any_hl = false;
    for (double lambda : lambdas) {
        WeakTypeRow row;
        row.n = n;
        row.lambda = lambda;
        row.measure_hl =
            cell * double(total_length(superlevel_intervals(g, lambda, 0)));
        // the sharp superlevel set is the union of K - n|K| over the dyadic
        // K whose plain average exceeds lambda
        row.measure_sharp =
            cell * double(total_length(superlevel_intervals(g, lambda, -n)));
        row.ratio = row.measure_hl > 0 ? row.measure_sharp / row.measure_hl : 0;
        any_hl = any_hl || row.measure_hl > 0;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    if (!any_hl)
        throw std::invalid_argument(
            "weak_type_test: superlevel set empty at every lambda");
    return rep;
}

CoveringReport covering_report(const DyadicGridFn& f, long long n,
                               double lambda) {
    validate_grid_fn(f);
    if (!(lambda > 0))
        throw std::invalid_argument("covering_report: lambda must be > 0");
    Grid g(f);
    CoveringReport rep;

    // candidates sorted widest first; dyadic nesting makes "contained in a
    // kept interval" equivalent to "left endpoint inside a kept interval"
    IntervalList cands;
    for (int lvl = 2 * f.J; lvl >= 0; --lvl) {
        long long L = 1LL << lvl;
        for (long long s = floor_div(g.clo, L) * L; s < g.chi; s += L)
            if (block_avg(g, s, L) > lambda) cands.emplace_back(s, s + L);
    }
    IntervalList maximal;
    for (auto [a, b] : cands) {
        IntervalList probe{{a, a + 1}};
        if (!subset_of(probe, maximal)) maximal.emplace_back(a, b);
        std::sort(maximal.begin(), maximal.end());
    }
    rep.interval_count = maximal.size();

    auto offsets = friends_set(std::llabs(n));
    rep.friend_count = offsets.size();
    long long sign = n < 0 ? -1 : 1;
    IntervalList friends;
    for (auto [a, b] : maximal)
        for (long long r : offsets) {
            long long shift = -sign * r * (b - a);
            friends.emplace_back(a + shift, b + shift);
        }
    friends = merge(friends);

    rep.covered = subset_of(superlevel_intervals(g, lambda, -n), friends);
    return rep;
}

bool covering_check(const DyadicGridFn& f, long long n, double lambda) {
    return covering_report(f, n, lambda).covered;
}

std::string weak_type_csv(const std::vector<WeakTypeRow>& rows) {
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.n != b.n ? a.n < b.n : a.lambda < b.lambda;
    });
    std::string out = "n,lambda,measure_sharp,measure_hl,ratio\n";
    char buf[256];
    for (const auto& r : sorted) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n", r.n,
                      r.lambda, r.measure_sharp, r.measure_hl, r.ratio);
        out += buf;
    }
    return out;
}

} // namespace tfa
