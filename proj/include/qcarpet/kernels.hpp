#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"

namespace qcarpet {

/// Discretization of a space-time panel. Both axes strictly increasing,
/// positions inside the box, times >= 0.
struct SpaceTimeGrid {
    std::vector<double> x_points;
    std::vector<double> t_points;

    static SpaceTimeGrid uniform(const CavityConfig& cfg, std::size_t nx, std::size_t nt,
                                 double t_end);
    void validate(const CavityConfig& cfg) const;
};

enum class Quantity { Density, Velocity };

const char* to_string(Quantity q) noexcept;

/// Row-major values, one row per time point.
struct CarpetGrid {
    SpaceTimeGrid grid;
    Quantity quantity = Quantity::Density;
    std::vector<double> values;
    /// Velocity nodes where the density fell below kDensityFloor (walls,
    /// exact nodes); stored as 0.
    std::size_t floored_nodes = 0;

    std::size_t rows() const noexcept { return grid.t_points.size(); }
    std::size_t cols() const noexcept { return grid.x_points.size(); }
    double at(std::size_t it, std::size_t ix) const { return values[it * cols() + ix]; }
};

/// OpenMP-parallel carpet over time rows. Results do not depend on the
/// thread count.
CarpetGrid carpet(const SpectralState& state, const SpaceTimeGrid& grid, Quantity quantity,
                  const DecoherenceParams& params);

/// OpenMP-parallel rho(x, x'; t) grid.
DensityMatrixGrid density_matrix_grid(const SpectralState& state, std::span<const double> x_points,
                                      std::span<const double> x_prime_points, double t,
                                      const DecoherenceParams& params);

/// Serial double-sum implementations of the grid kernels, kept as the
/// correctness baseline for tests and benchmarks.
namespace reference {

CarpetGrid carpet(const SpectralState& state, const SpaceTimeGrid& grid, Quantity quantity,
                  const DecoherenceParams& params);

DensityMatrixGrid density_matrix_grid(const SpectralState& state, std::span<const double> x_points,
                                      std::span<const double> x_prime_points, double t,
                                      const DecoherenceParams& params);

/// Velocity straight from the pair double sum. Throws NodeProximity below
/// the density floor.
double velocity(const SpectralState& state, double x, double t, const DecoherenceParams& params);

} // namespace reference

} // namespace qcarpet
