#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tfa/bandlimited.hpp"
#include "tfa/dyadic.hpp"
#include "tfa/maximal.hpp"
#include "tfa/rng.hpp"

namespace tfa {

// One restricted-weak-type run: a quadtile collection, three measurable
// sets with shifts, and the exponents of the target bound.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    double beta = 2.0;
    int scale_lo = 0, scale_hi = 2;   // quadtile scale band (|I| = 2^-k)
    std::size_t tile_count = 12;
    std::array<long long, 3> shifts{0, 0, 0};
    std::array<double, 3> gammas{0.9, 0.45, 0.9};
    double C_init = 8;                 // exceptional-set threshold constant
    int grid_J = 6;                    // set resolution
    long long period = 8;              // sets live on [0, period)
    int set_parts = 16;                // max intervals per random set
    bool random_phases = false;        // perturb indicators by unit phases
};

// Indicator of a random union of at most max_parts grid intervals.
DyadicGridFn random_grid_set(Rng& rng, int J, long long lo, long long hi,
                             int max_parts);

double set_measure(const DyadicGridFn& indicator);

// a with the cells of omega removed (omega indexed on its own domain).
DyadicGridFn set_difference(const DyadicGridFn& a, const DyadicGridFn& omega);

struct ExceptionalSet {
    DyadicGridFn omega;   // indicator on a padded domain
    double measure = 0;
    double C_used = 0;    // doubled from the initial C until measure < 1/2
};

// Union over j of the superlevel sets of the shifted maximal function of
// 1_{E_j}/|E_j| at threshold C log2(2 + |n_j|). Throws on a null set.
ExceptionalSet build_exceptional_set(const std::array<DyadicGridFn, 3>& E,
                                     const std::array<long long, 3>& shifts,
                                     double C_init = 8);

// Distance strata: 0 holds the quadtiles whose time interval meets the
// complement of omega; stratum d >= 1 collects those fully inside with
// dist(I, complement)/|I| in (2^{d-1}, 2^d] (tiles closer than |I| land in
// stratum 1 so that the strata exhaust the collection).
std::map<int, std::vector<std::size_t>> partition_by_distance(
    const std::vector<QuadTile>& collection, const DyadicGridFn& omega);

struct RwtReport {
    double omega_measure = 0, C_used = 0;
    double e4_measure = 0, e4_prime_measure = 0;
    std::array<double, 3> set_measures{};
    Cplx total{};                        // quadrilinear form over everything
    std::map<int, Cplx> stratum_sums;    // per-distance-stratum contribution
    double recombine_error = 0;          // |sum of strata - total|
    double envelope = 0;                 // prod log^4 times prod |E_j|^gamma
    double bound_ratio = 0;              // |total| / envelope
};

// Full pipeline: build the collection and sets from the seed, remove the
// exceptional set from E_4, evaluate the form stratum by stratum, and
// report the ratio against the restricted-weak-type envelope. Throws
// std::invalid_argument when the gammas leave their ranges (first and third
// in (0,1), second in (0,1/2)).
RwtReport rwt_experiment(const ExperimentConfig& cfg);

// Same pipeline on caller-provided sets and collection; E4 must have
// positive measure after the exceptional set is removed.
RwtReport rwt_run(const ExperimentConfig& cfg,
                  const std::vector<QuadTile>& collection,
                  const std::array<DyadicGridFn, 3>& E,
                  const DyadicGridFn& E4);

std::string rwt_json(const ExperimentConfig& cfg, const RwtReport& rep);

} // namespace tfa
