#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tfa {

// Exact rational scalar. Interval endpoints in the shifted dyadic meshes
// have denominators of the form 3*2^m, and the order predicates dilate
// intervals by factors up to 10^9, so arbitrary precision is required.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat pow2(int e) {
    if (e >= 0) return Rat(BigInt(1) << e);
    return Rat(1, BigInt(1) << (-e));
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Half-open interval [lo, hi) with exact rational endpoints.
struct RatInterval {
    Rat lo, hi;

    RatInterval() = default;
    RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::invalid_argument("RatInterval: lo > hi");
    }

    Rat length() const { return hi - lo; }
    Rat center() const { return (lo + hi) / 2; }
    bool degenerate() const { return lo == hi; }

    bool contains(const Rat& x) const { return x >= lo && x < hi; }
    bool contains(const RatInterval& o) const { return o.lo >= lo && o.hi <= hi; }
    bool strictly_contains(const RatInterval& o) const {
        return contains(o) && !(lo == o.lo && hi == o.hi);
    }
    // Open-overlap: shared interior.
    bool overlaps(const RatInterval& o) const { return lo < o.hi && o.lo < hi; }
    bool operator==(const RatInterval& o) const { return lo == o.lo && hi == o.hi; }

    // cI: same center, c times the length.
    RatInterval dilate(const Rat& c) const {
        Rat ctr = center(), half = c * length() / 2;
        return {ctr - half, ctr + half};
    }
    RatInterval translate(const Rat& t) const { return {lo + t, hi + t}; }
};

inline Rat dist(const RatInterval& a, const RatInterval& b) {
    if (a.overlaps(b) || a.hi == b.lo || b.hi == a.lo) return 0;
    return a.hi <= b.lo ? b.lo - a.hi : a.lo - b.hi;
}

} // namespace tfa
