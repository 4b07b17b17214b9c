#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tfa {

// Nonnegative step function on a dyadic grid: cell width 2^{-J}, domain
// [lo, hi) with integer endpoints, one value per finest cell. All maximal
// operators below read and write this carrier.
struct DyadicGridFn {
    int J = 0;
    long long lo = 0, hi = 0;
    std::vector<double> values;

    long long cells() const { return (hi - lo) << J; }
    // value at the cell containing x; 0 outside the domain
    double at_cell(long long cell) const;
};

// Throws std::invalid_argument on negative values, J outside [0, 30], or a
// value count that does not match the domain.
void validate_grid_fn(const DyadicGridFn& f);

// Dyadic Hardy-Littlewood maximal function. The supremum runs over dyadic
// intervals of length 2^{-J} .. 2^{J}; the output domain is widened so that
// every cell where the truncated supremum is positive is represented.
DyadicGridFn hl_max(const DyadicGridFn& f);

// Shifted maximal function: averages of f weighted by the approximate cutoff
// (1 + ((y - c)/|I|)^2)^{-1/2} centered on the shifted interval I + n|I|.
// The weight integrates in closed form against the step function (asinh).
DyadicGridFn shifted_max(const DyadicGridFn& f, long long n);

// Sharp variant: plain averages (1/|I|) int_{I + n|I|} f over dyadic I.
DyadicGridFn sharp_shifted_max(const DyadicGridFn& f, long long n);

struct WeakTypeRow {
    long long n = 0;
    double lambda = 0, measure_sharp = 0, measure_hl = 0, ratio = 0;
};

struct WeakTypeReport {
    std::vector<WeakTypeRow> rows;
    double max_ratio = 0;
};

// Superlevel-set measures of the sharp shifted maximal function against the
// plain dyadic one, per lambda. Measures are exact unions of intervals, so
// no output-domain truncation enters. Throws std::invalid_argument when the
// Hardy-Littlewood superlevel set is empty at every lambda.
WeakTypeReport weak_type_test(const DyadicGridFn& f, long long n,
                              const std::vector<double>& lambdas);

struct CoveringReport {
    bool covered = false;
    std::size_t interval_count = 0;   // maximal selected intervals
    std::size_t friend_count = 0;     // distinct friend intervals per selected
};

// Selects the maximal dyadic intervals whose average exceeds lambda, forms
// their friend translates, and verifies on the grid that the superlevel set
// of the sharp shifted maximal function is covered by the friends.
CoveringReport covering_report(const DyadicGridFn& f, long long n,
                               double lambda);
bool covering_check(const DyadicGridFn& f, long long n, double lambda);

std::string weak_type_csv(const std::vector<WeakTypeRow>& rows);

} // namespace tfa
