#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tfa/bandlimited.hpp"
#include "tfa/dyadic.hpp"

namespace tfa {

// Collection of quadtiles whose j-th tiles sit below the top's j-th tile.
// Members and top are indices into the bound collection; the top need not be
// a member.
struct Tree {
    std::size_t top = 0;
    int tree_type = 2;  // 2, 3 or 4
    std::vector<std::size_t> members;
};

// Sparse coefficient storage keyed by (quadtile index, position).
struct CoefficientSequence {
    std::map<std::pair<std::size_t, int>, Cplx> values;

    Cplx at(std::size_t p, int j) const;  // throws if missing
    void set(std::size_t p, int j, Cplx v) { values[{p, j}] = v; }
};

// Coefficients <f, phi_{P_j^{n_j}, j}> for one position over a collection.
CoefficientSequence bind_coefficients(const BandlimitedFn& f,
                                      const std::vector<QuadTile>& collection,
                                      int j, int n_j);

// Offsets of the unit-|I_T| translates that a tree shifted by n units of the
// member scale can reach: union over depths k of floor(n/2^k) and
// floor((2^k - 1 + n)/2^k), which stabilizes to {0, 1}.
std::set<long long> friends_set(long long n);

// Maximal i-trees (one per candidate top) plus all one-quadtile trees.
// With good_for != 0, multi-quadtile trees are kept only when good_for is a
// good index with respect to i in the collection's rank certificate.
std::vector<Tree> enumerate_trees(const std::vector<QuadTile>& collection,
                                  int i, int good_for = 0);

// sup over admissible trees of (|I_T|^-1 sum |a_{P_j}|^2)^(1/2), where the
// trees are the single-quadtile ones together with i-trees (i = 2, 3, 4)
// having j as a good index.
double size_j(const CoefficientSequence& coeffs,
              const std::vector<QuadTile>& collection, int j);

// |I_T|^-1 times the weak-L1 norm over I_T of the square function
// (sum |a|^2 1_{I_P} / |I_P|)^(1/2), computed by exact level sets of the
// piecewise-constant profile.
double weak_l1_size(const CoefficientSequence& coeffs,
                    const std::vector<QuadTile>& collection, const Tree& tree,
                    int j);

// (sup over admissible trees of the weak form) / size_j.
double john_nirenberg_check(const CoefficientSequence& coeffs,
                            const std::vector<QuadTile>& collection, int j);

// Pairwise strong j-disjointness: the position-j tiles never coincide, and a
// 2-dilated frequency overlap forces the time interval of either quadtile out
// of the other tree's top interval.
bool strongly_disjoint_check(const std::vector<Tree>& trees,
                             const std::vector<QuadTile>& collection, int j);

enum class EnergyMode { Greedy, Exhaustive };

// sup over dyadic levels 2^n and families of strongly j-disjoint trees, each
// meeting the per-tree mass lower bound at level n and the subtree upper
// bound at level n+1, of 2^n (sum |I_T|)^(1/2). Greedy builds the family by
// repeatedly taking the widest admissible tree; exhaustive searches all
// families and is limited to collections of at most 12 quadtiles.
double energy_j(const CoefficientSequence& coeffs,
                const std::vector<QuadTile>& collection, int j, EnergyMode mode);

// Discrete model form: sum over quadtiles of |I_P|^-1 times the product of
// the four wave packet pairings, with positions 1..3 shifted and n_4 = 0.
Cplx lambda_form(const std::vector<QuadTile>& collection, const BandlimitedFn& f1,
                 const BandlimitedFn& f2, const BandlimitedFn& f3,
                 const BandlimitedFn& f4, const std::array<int, 3>& shifts);

// RHS - LHS of the single-tree bound: |I_T| prod_j size_j(restricted to the
// tree) minus sum_{P in T} |I_P|^-1 prod_j |a_{P_j}|. Nonnegative by the
// Cauchy-Schwarz proof with constant 1.
double single_tree_bound_check(const CoefficientSequence& coeffs,
                               const std::vector<QuadTile>& collection,
                               const Tree& tree);

struct Stratum {
    std::vector<std::size_t> members;
    std::vector<Tree> trees;  // cover of the members
    double sum_it = 0;        // sum of |I_T| over the cover
    double size_bound = 0;    // post-hoc size of the stratum
};

struct Stratification {
    double total_size = 0;    // S_j of the full collection
    double total_energy = 0;  // E_j of the full collection (greedy)
    std::map<int, Stratum> strata;
};

// Iterative size-halving split: stratum n collects the trees extracted while
// forcing the remaining size below 2^(-n-1) E_j. Throws if the loop exceeds
// 4x the collection cardinality (selection bug guard).
Stratification size_energy_decompose(const CoefficientSequence& coeffs,
                                     const std::vector<QuadTile>& collection,
                                     int j);

std::string stratification_json(const Stratification& s);

// |Lambda| / (size_1 * prod_{j=2..4} size_j^theta_j energy_j^(1-theta_j));
// zero denominator yields 0.
double size_energy_inequality_check(const std::vector<QuadTile>& collection,
                                    const BandlimitedFn& f1,
                                    const BandlimitedFn& f2,
                                    const BandlimitedFn& f3,
                                    const BandlimitedFn& f4,
                                    const std::array<int, 3>& shifts,
                                    const std::array<double, 3>& thetas);

} // namespace tfa
