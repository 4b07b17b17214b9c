#include "tfa/wavepacket.hpp"

#include <cmath>
#include <stdexcept>

#include "tfa/quadrature.hpp"

namespace tfa {

double chi_tilde(const RatInterval& I, double x) {
    double len = to_double(I.length());
    if (len <= 0) throw std::invalid_argument("chi_tilde: degenerate interval");
    double u = (x - to_double(I.center())) / len;
    return 1.0 / std::sqrt(1.0 + u * u);
}

double BumpProfile::fourier(double xi) const {
    double u = xi / width;
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double BumpProfile::spatial(double x) const {
    // Inverse transform of an even real profile; the panel count follows the
    // oscillation count 2 width |x| over the support.
    int panels = 4 + int(std::ceil(std::abs(x) * width));
    auto f = [&](double xi) { return fourier(xi) * std::cos(2.0 * M_PI * xi * x); };
    return 2.0 * integrate(f, 0.0, width, {}, panels);
}

Cplx WavePacket::operator()(double x) const {
    double y = (x - x0) / scale;
    double env = amp * profile.spatial(y);
    double phase = 2.0 * M_PI * freq_center * (x - x0);
    return env * Cplx(std::cos(phase), std::sin(phase));
}

Cplx WavePacket::fourier(double xi) const {
    double env = amp * scale * profile.fourier(scale * (xi - freq_center));
    if (env == 0.0) return {0.0, 0.0};
    double phase = -2.0 * M_PI * xi * x0;
    return env * Cplx(std::cos(phase), std::sin(phase));
}

WavePacket make_wave_packet(const Tile& tile, double p, int n,
                            const BumpProfile& profile) {
    if (p < 1) throw std::invalid_argument("make_wave_packet: p < 1");
    WavePacket w;
    w.tile = tile;
    w.p = p;
    w.n = n;
    w.profile = profile;
    w.scale = to_double(tile.I().length());
    w.x0 = to_double(tile.I().center()) + n * w.scale;
    w.freq_center = to_double(tile.omega().center());
    w.amp = std::pow(w.scale, -1.0 / p);
    return w;
}

Cplx inner_product(const BandlimitedFn& f, const WavePacket& phi) {
    Cplx total{0.0, 0.0};
    for (const auto& [k, c] : f.coeffs) total += c * std::conj(phi.fourier(k / f.period));
    return total;
}

Cplx inner_product(const SampledFunction& f, const WavePacket& phi) {
    if (f.values.empty()) throw std::invalid_argument("inner_product: empty samples");
    Cplx total{0.0, 0.0};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        total += f.values[i] * std::conj(phi(f.point(i)));
    return total * f.dx();
}

std::vector<Cplx> coefficient_array(const BandlimitedFn& f,
                                    const std::vector<QuadTile>& collection,
                                    int j, int n_j, double p) {
    if (j < 1 || j > 4) throw std::invalid_argument("coefficient_array: position");
    std::vector<Cplx> out;
    out.reserve(collection.size());
    for (const auto& qt : collection)
        out.push_back(inner_product(f, make_wave_packet(qt.tile(j), p, n_j)));
    return out;
}

double decay_constant(const WavePacket& phi, int M, int grid_n, double span) {
    RatInterval In = phi.tile.I().translate(Rat(phi.n) * phi.tile.I().length());
    double best = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        double x = phi.x0 + span * phi.scale * (double(i) / (grid_n - 1) - 0.5);
        double ratio = std::abs(phi(x)) * std::pow(phi.scale, 1.0 / phi.p) /
                       std::pow(chi_tilde(In, x), M);
        best = std::max(best, ratio);
    }
    return best;
}

} // namespace tfa
