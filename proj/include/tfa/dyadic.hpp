#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "tfa/rational.hpp"
#include "tfa/rng.hpp"

namespace tfa {

// Interval of the shifted dyadic mesh: 2^j (k + (0,1) + (-1)^j sigma) with
// sigma in {0, 1/3, 2/3} stored as sigma3/3.
struct MeshInterval {
    int j = 0;
    long long k = 0;
    int sigma3 = 0;  // 0, 1 or 2

    RatInterval realize() const;
    Rat length() const { return pow2(j); }
    bool operator==(const MeshInterval& o) const = default;
    auto operator<=>(const MeshInterval& o) const = default;
};

RatInterval mesh_interval(int j, long long k, int sigma3);

// Axis-aligned cube of a shifted n-dyadic mesh, n <= 4; one scale, per-axis
// position and shift.
struct ShiftedCube {
    int j = 0;
    std::vector<long long> k;
    std::vector<int> sigma3;

    std::size_t dim() const { return k.size(); }
    RatInterval side(std::size_t d) const { return mesh_interval(j, k[d], sigma3[d]); }
    bool same_shift(const ShiftedCube& o) const {
        return dim() == o.dim() && sigma3 == o.sigma3;
    }
    bool operator==(const ShiftedCube& o) const = default;
};

// Smallest-scale shifted dyadic cube Q' (scanned deterministically) with
// Q contained in (7/10) Q'. The sides of Q must have equal length.
ShiftedCube find_enclosing_shifted_cube(const std::vector<RatInterval>& Q);

// Pair predicate of sparseness: strictly smaller cubes stay smaller after
// 10^9 dilation, equal-size cubes have disjoint 10^9 dilates.
bool is_sparse_pair(const ShiftedCube& a, const ShiftedCube& b);
bool is_sparse(const std::vector<ShiftedCube>& cubes);

// Greedy first-fit partition into sparse parts (input visited in sorted
// order). Union is the input as a multiset.
std::vector<std::vector<ShiftedCube>> split_sparse(
    const std::vector<ShiftedCube>& cubes);

// Time-frequency rectangle. Positions 1..3 have |I| |omega| = 1; the
// position-4 interval of a quadtile is wider (it must absorb the sum of the
// other three frequency supports), so area is not enforced here.
struct Tile {
    MeshInterval time;  // sigma3 = 0
    MeshInterval freq;

    RatInterval I() const { return time.realize(); }
    RatInterval omega() const { return freq.realize(); }
    bool operator==(const Tile& o) const = default;
    auto operator<=>(const Tile& o) const = default;
};

// P' < P: I_{P'} strictly inside I_P and 5 omega_P inside 5 omega_{P'}.
bool order_lt(const Tile& tp, const Tile& p);
bool order_leq(const Tile& tp, const Tile& p);
// P' lesssim P: I_{P'} inside I_P and 10^7 omega_P inside 10^7 omega_{P'}.
bool order_lesssim(const Tile& tp, const Tile& p);
// lesssim and not leq.
bool order_lesssim_prime(const Tile& tp, const Tile& p);

struct QuadTile {
    MeshInterval time;                  // shared time interval, sigma3 = 0
    std::array<MeshInterval, 4> freq;   // positions 1..4

    Tile tile(int i) const { return {time, freq[std::size_t(i - 1)]}; }
    RatInterval I() const { return time.realize(); }
    bool operator==(const QuadTile& o) const = default;
    auto operator<=>(const QuadTile& o) const = default;
};

// Partition {{i1,i2,i3},{i4}} of positions 1..4; i4 is the paraproduct slot,
// whose ordering degenerates to frequency intersection tests.
struct RankPartition {
    std::array<int, 3> tri{2, 3, 4};
    int para = 1;
};

struct Rank10Report {
    bool ok = true;
    // (index of P', index of P, violated bullet 1..3)
    std::vector<std::array<std::size_t, 3>> violations;
    // good indices observed for each of the three tri positions: the
    // intersection over all scale-separated comparable pairs of the set of
    // positions tau with P'_tau lesssim' P_tau
    std::array<std::set<int>, 3> good_indices;
};

Rank10Report rank10_check(const std::vector<QuadTile>& collection,
                          const RankPartition& part = {});

struct CaseCollection {
    std::vector<QuadTile> quadtiles;
    int refinement_parts = 1;  // parts of the violation-pair coloring
    int case_id = 0;
};

// Quadtile families with the geometry of the three symbol regions:
// case 1: omega_2 and omega_3 overlap near the line beta xi2 + xi3 = 0;
// cases 2 and 3: omega_2, omega_3 separated by a couple of units of scale.
// The returned collection is the largest refined part that passes
// rank10_check with the default partition; refinement_parts records how many
// parts the refinement needed.
CaseCollection generate_case_collection(int case_id, double beta, int kmin,
                                        int kmax, int positions,
                                        std::uint64_t seed);

} // namespace tfa
