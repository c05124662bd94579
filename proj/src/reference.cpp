#include <cmath>

#include "qcarpet/decoherence.hpp"
#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/kernels.hpp"
#include "qcarpet/modal_series.hpp"

namespace qcarpet::reference {

double velocity(const SpectralState& state, double x, double t, const DecoherenceParams& params) {
    const CavityConfig& cfg = state.cavity();
    const double density = decohered_density(state, x, t, params);
    if (!(density >= kDensityFloor)) throw NodeProximity(x, t, density);

    const int n = state.size();
    std::vector<double> phi(static_cast<std::size_t>(n)), dphi(static_cast<std::size_t>(n));
    for (int a = 1; a <= n; ++a) {
        phi[a - 1] = eigenmode(a, x, cfg);
        dphi[a - 1] = eigenmode_derivative(a, x, cfg);
    }
    double numerator = 0.0;
    for (int a = 1; a <= n; ++a) {
        const double ca = state.coeff(a);
        if (ca == 0.0) continue;
        for (int b = a + 1; b <= n; ++b) {
            const double cb = state.coeff(b);
            if (cb == 0.0) continue;
            const double wronskian = phi[b - 1] * dphi[a - 1] - phi[a - 1] * dphi[b - 1];
            numerator += ca * cb * wronskian * std::sin(pair_phase(a, b, t, cfg)) *
                         std::exp(-damping_rate(a, b, params, cfg) * t);
        }
    }
    return cfg.hbar / cfg.m * numerator / density;
}

CarpetGrid carpet(const SpectralState& state, const SpaceTimeGrid& grid, Quantity quantity,
                  const DecoherenceParams& params) {
    grid.validate(state.cavity());
    CarpetGrid out;
    out.grid = grid;
    out.quantity = quantity;
    out.values.reserve(grid.x_points.size() * grid.t_points.size());
    for (double t : grid.t_points) {
        for (double x : grid.x_points) {
            if (quantity == Quantity::Density) {
                out.values.push_back(decohered_density(state, x, t, params));
                continue;
            }
            try {
                out.values.push_back(velocity(state, x, t, params));
            } catch (const NodeProximity&) {
                out.values.push_back(0.0);
                ++out.floored_nodes;
            }
        }
    }
    return out;
}

DensityMatrixGrid density_matrix_grid(const SpectralState& state, std::span<const double> x_points,
                                      std::span<const double> x_prime_points, double t,
                                      const DecoherenceParams& params) {
    DensityMatrixGrid out;
    out.x_points.assign(x_points.begin(), x_points.end());
    out.x_prime_points.assign(x_prime_points.begin(), x_prime_points.end());
    out.t = t;
    out.values.reserve(x_points.size() * x_prime_points.size());
    for (double x : x_points)
        for (double xp : x_prime_points) out.values.push_back(density_matrix(state, x, xp, t, params));
    return out;
}

} // namespace qcarpet::reference
