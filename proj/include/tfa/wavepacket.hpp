#pragma once

#include <complex>
#include <vector>

#include "tfa/bandlimited.hpp"
#include "tfa/dyadic.hpp"

namespace tfa {

// Approximate cutoff adapted to I: (1 + ((x - x_I)/|I|)^2)^{-1/2}.
double chi_tilde(const RatInterval& I, double x);

// Mother profile of every packet: a compactly supported smooth bump on the
// Fourier side, half-width strictly inside 9/20 so the adapted packet's
// spectrum lands in (9/10) omega. The spatial profile is its inverse
// transform: real, even, with superpolynomial decay.
struct BumpProfile {
    double width = 0.4;

    double fourier(double xi) const;  // exp(1 - 1/(1 - (xi/width)^2)), peak 1
    double spatial(double x) const;
};

// L^p normalized packet on the shifted time interval I^n = I + n|I|:
//   phi(x) = |I|^{-1/p} eta((x - x0)/|I|) e^{2 pi i c_omega (x - x0)}
// with x0 the center of I^n and c_omega the center of the tile's frequency
// interval. ||phi||_p is then the mother's L^p norm for every tile.
struct WavePacket {
    Tile tile;
    double p = 2;
    int n = 0;
    BumpProfile profile;

    double scale = 1;        // |I|
    double x0 = 0;           // center of I^n
    double freq_center = 0;  // center of omega
    double amp = 1;          // |I|^{-1/p}

    Cplx operator()(double x) const;
    // Transform over the real line: amp |I| eta_hat(|I|(xi - c)) e^{-2 pi i xi x0}
    // after centering; support inside (9/10) omega.
    Cplx fourier(double xi) const;
};

WavePacket make_wave_packet(const Tile& tile, double p, int n,
                            const BumpProfile& profile = {});

// <f, phi> with f understood as its periodic extension over the line; the
// band-limited form is exact (finitely many modes against the packet's
// Fourier transform), the sampled form is the grid quadrature over one
// period.
Cplx inner_product(const BandlimitedFn& f, const WavePacket& phi);
Cplx inner_product(const SampledFunction& f, const WavePacket& phi);

// One coefficient per quadtile at position j with time shift n_j.
std::vector<Cplx> coefficient_array(const BandlimitedFn& f,
                                    const std::vector<QuadTile>& collection,
                                    int j, int n_j, double p = 2);

// Empirical constant sup_x |phi(x)| |I|^{1/p} / chi_tilde(I^n, x)^M over a
// uniform grid spanning `span` lengths of I around the packet.
double decay_constant(const WavePacket& phi, int M, int grid_n = 10001,
                      double span = 50);

} // namespace tfa
