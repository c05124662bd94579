#include "qcarpet/kernels.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/modal_series.hpp"

namespace qcarpet {

SpaceTimeGrid SpaceTimeGrid::uniform(const CavityConfig& cfg, std::size_t nx, std::size_t nt,
                                     double t_end) {
    if (nx < 2 || nt < 1) throw DomainError("grid needs >= 2 positions and >= 1 time");
    if (!(t_end >= 0.0)) throw DomainError("grid end time must be >= 0");
    if (nt > 1 && !(t_end > 0.0)) throw DomainError("multi-row grid needs a positive end time");
    SpaceTimeGrid g;
    g.x_points = linspace(-cfg.half_width(), cfg.half_width(), nx);
    g.t_points = linspace(0.0, t_end, nt);
    return g;
}

void SpaceTimeGrid::validate(const CavityConfig& cfg) const {
    if (x_points.empty() || t_points.empty()) throw DomainError("grid axes must be non-empty");
    for (std::size_t i = 0; i < x_points.size(); ++i) {
        check_in_box(x_points[i], cfg);
        if (i > 0 && !(x_points[i] > x_points[i - 1]))
            throw DomainError("grid x axis must be strictly increasing");
    }
    for (std::size_t i = 0; i < t_points.size(); ++i) {
        if (!(t_points[i] >= 0.0) || !std::isfinite(t_points[i]))
            throw DomainError("grid times must be finite and >= 0");
        if (i > 0 && !(t_points[i] > t_points[i - 1]))
            throw DomainError("grid t axis must be strictly increasing");
    }
}

const char* to_string(Quantity q) noexcept {
    return q == Quantity::Density ? "density" : "velocity";
}

CarpetGrid carpet(const SpectralState& state, const SpaceTimeGrid& grid, Quantity quantity,
                  const DecoherenceParams& params) {
    grid.validate(state.cavity());
    const ModalSeries series(state, params);

    CarpetGrid out;
    out.grid = grid;
    out.quantity = quantity;
    const std::size_t nx = grid.x_points.size();
    const auto nt = static_cast<std::ptrdiff_t>(grid.t_points.size());
    out.values.assign(nx * grid.t_points.size(), 0.0);
    std::size_t floored = 0;

#pragma omp parallel for schedule(static) reduction(+ : floored)
    for (std::ptrdiff_t it = 0; it < nt; ++it) {
        const auto ts = series.slice(grid.t_points[static_cast<std::size_t>(it)]);
        double* row = out.values.data() + static_cast<std::size_t>(it) * nx;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = grid.x_points[ix];
            if (quantity == Quantity::Density) {
                row[ix] = series.density(x, ts);
            } else {
                const FlowSample s = series.flow(x, ts);
                if (s.density >= kDensityFloor) {
                    row[ix] = s.current / s.density;
                } else {
                    row[ix] = 0.0;
                    ++floored;
                }
            }
        }
    }
    out.floored_nodes = floored;
    return out;
}

namespace {

// c_a phi_a(x_i), rows = positions.
std::vector<double> weighted_mode_table(const SpectralState& state, std::span<const double> xs) {
    const CavityConfig& cfg = state.cavity();
    const auto n = static_cast<std::size_t>(state.size());
    std::vector<double> table(xs.size() * n);
    const double norm = std::sqrt(2.0 / cfg.L);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        check_in_box(xs[i], cfg);
        for (std::size_t a = 0; a < n; ++a) {
            const double k = static_cast<double>(a + 1) * std::numbers::pi / cfg.L;
            const double phi = (a % 2 == 0) ? std::cos(k * xs[i]) : std::sin(k * xs[i]);
            table[i * n + a] = state.coeffs()[a] * norm * phi;
        }
    }
    return table;
}

} // namespace

DensityMatrixGrid density_matrix_grid(const SpectralState& state, std::span<const double> x_points,
                                      std::span<const double> x_prime_points, double t,
                                      const DecoherenceParams& params) {
    const CavityConfig& cfg = state.cavity();
    params.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
    const auto n = static_cast<std::size_t>(state.size());
    const std::size_t nx = x_points.size();
    const std::size_t nxp = x_prime_points.size();

    const auto u = weighted_mode_table(state, x_points);
    const auto v = weighted_mode_table(state, x_prime_points);

    // M_ab = e^{-i (E_a - E_b) t / hbar} e^{-beta_ab t}
    const double s = t / revival_times(cfg).t_rev;
    const double kappa = params.gamma * 2.0 * std::numbers::pi * s;
    std::vector<std::complex<double>> phase(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double a1 = static_cast<double>(a + 1);
        phase[a] = std::polar(1.0, 2.0 * std::numbers::pi * std::fmod(a1 * a1 * s, 1.0));
    }
    std::vector<std::complex<double>> m(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double a1 = static_cast<double>(a + 1), b1 = static_cast<double>(b + 1);
            const double damp = kappa == 0.0 ? 1.0 : std::exp(-kappa * std::abs(b1 * b1 - a1 * a1));
            m[a * n + b] = std::conj(phase[a]) * phase[b] * damp;
        }
    }

    const double lambda = params.effective_lambda(cfg);
    DensityMatrixGrid out;
    out.x_points.assign(x_points.begin(), x_points.end());
    out.x_prime_points.assign(x_prime_points.begin(), x_prime_points.end());
    out.t = t;
    out.values.assign(nx * nxp, {0.0, 0.0});

#pragma omp parallel
    {
        std::vector<std::complex<double>> row_m(n);
#pragma omp for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(nx); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            for (std::size_t b = 0; b < n; ++b) {
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t a = 0; a < n; ++a) acc += u[i * n + a] * m[a * n + b];
                row_m[b] = acc;
            }
            for (std::size_t j = 0; j < nxp; ++j) {
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t b = 0; b < n; ++b) acc += row_m[b] * v[j * n + b];
                const double d = x_points[i] - x_prime_points[j];
                out.values[i * nxp + j] = lambda == 0.0 ? acc : acc * std::exp(-lambda * d * d * t);
            }
        }
    }
    return out;
}

} // namespace qcarpet
