#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "tfa/bandlimited.hpp"
#include "tfa/dyadic.hpp"
#include "tfa/wavepacket.hpp"

namespace tfa {

// Six-term coefficient decay envelope. The M exponents are the smoothness
// orders available to each term; the c constants absorb the beta dependence
// and are meant to be fitted, not asserted.
struct CoeffEnvelopeParams {
    int M1 = 8, M2 = 8, M3 = 8, M4 = 8;
    double c1 = 1, c2 = 1, c3 = 1, c4 = 1, c5 = 1, c6 = 1;
};

// Japanese bracket shifted to stay >= 2 at the origin.
inline double angle_bracket(double n) { return 2.0 + std::abs(n); }

double decay_envelope(int n1, int n2, int n3, double beta,
                      const CoeffEnvelopeParams& params = {});

// Frequency cube of a quadtile rescaled to unit side length, with the case
// tag of the collection it came from. Positions 1..3 only; the fourth
// frequency interval is determined by the others and does not enter the
// coefficient integral.
struct RescaledCube {
    int case_id = 0;
    std::array<RatInterval, 3> q;
};

RescaledCube rescale(const QuadTile& qt, int case_id);

// Smooth partition-of-unity weight in the plane (xi1, beta xi2 + xi3), built
// from annular and low-pass bumps over dyadic scales (the sum is locally
// finite and telescopes). Exactly 1 on any region with max(|xi1|, |u|)
// >= 1/8, decaying to 0 at the origin of the plane.
double atilde(double xi1, double u);

// Coefficient of the modulation e^{2 pi i n xi} in the expansion of the
// rescaled symbol-times-bumps integrand over the unit cube. Inner integration
// runs over xi3 with breakpoints on both kink planes of the averaged symbol,
// and the outer axes split where those planes cross the support edges.
// refine multiplies the panel counts (used for self-convergence oracles).
// Throws if the partition-of-unity weight leaves (1/10, 10) on the support.
Cplx compute_C(const RescaledCube& cube, int n1, int n2, int n3, double beta,
               int refine = 1);

// Same coefficient computed from the unrescaled integral at the quadtile's
// own scale, with the 1/|Q|^3 change-of-variables prefactor. Agrees with
// compute_C(rescale(qt, c), ...) up to quadrature error.
Cplx compute_C_scaled(const QuadTile& qt, int case_id, int n1, int n2, int n3,
                      double beta, int refine = 1);

// Least-squares decay order of |C| along one axis (1-based): fits
// log |C(n e_axis)| against log<n> and returns the negated slope.
double fit_decay_order(const RescaledCube& cube, int axis, double beta,
                       const std::vector<int>& ns);

struct DecayRecord {
    int case_id = 0;
    int scale = 0;  // log2 of the frequency side length
    int n1 = 0, n2 = 0, n3 = 0;
    double abs_c = 0, envelope = 0, ratio = 0;
};

struct DecayReport {
    double K = 0;  // minimal constant with |C| <= K * envelope on the sample
    std::map<int, double> K_by_case;
    std::map<int, double> K_by_scale;
    std::vector<DecayRecord> records;
};

DecayReport verify_decay(const std::vector<CaseCollection>& sample,
                         const std::vector<std::array<int, 3>>& ngrid,
                         double beta, const CoeffEnvelopeParams& params = {},
                         int threads = 1);

std::string decay_report_csv(const DecayReport& report);

// Partial sums of envelope^p4 over dyadic blocks <n3> in [2^j, 2^(j+1)),
// j = 1 .. jmax. The inner (n1, n2) sums are restricted to windows around
// the concentration centers of the six terms, which captures all but a
// superpolynomially small tail.
struct SummabilityReport {
    std::vector<double> block_sums;
    std::vector<double> ratios;  // block_sums[j+1] / block_sums[j]
};

SummabilityReport summability_check(double p4, const CoeffEnvelopeParams& params,
                                    int jmax, double beta = 2.0);

} // namespace tfa
