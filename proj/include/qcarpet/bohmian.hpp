#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"

namespace qcarpet {

/// v(x, t) = J / rho for the (optionally damped) modal state.
/// Throws NodeProximity when rho < kDensityFloor.
double velocity(const SpectralState& state, double x, double t, const DecoherenceParams& params);

enum class TrajectoryStatus { Completed, StepFloorHit };

const char* to_string(TrajectoryStatus s) noexcept;

struct Trajectory {
    double x0 = 0.0;
    std::vector<double> t;
    std::vector<double> x;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

struct IntegratorOptions {
    double tol = 1e-8;
    double max_step = 0.0;    ///< 0 selects tau / 2000
    double step_floor = 0.0;  ///< 0 selects tau * 1e-12
};

/// Adaptive Dormand-Prince 5(4) integration of dx/dt = v(x, t).
///
/// Steps are clipped so that every entry of `sample_times` is hit exactly;
/// the trajectory records x at those times. With empty `sample_times` every
/// accepted step is recorded. A stage that lands below the density floor
/// rejects the step and halves it; reaching the step floor ends the run
/// with StepFloorHit and the samples gathered so far.
Trajectory integrate_trajectory(const SpectralState& state, double x0,
                                std::span<const double> sample_times,
                                const DecoherenceParams& params, const IntegratorOptions& opts = {});

/// Convenience overload recording every accepted step up to t_end.
Trajectory integrate_trajectory(const SpectralState& state, double x0, double t_end,
                                const DecoherenceParams& params, double tol = 1e-8);

enum class Seeding { Uniform, Quantile, Explicit };

const char* to_string(Seeding s) noexcept;

struct EnsembleSpec {
    int count = 50;
    Seeding seeding = Seeding::Uniform;
    std::vector<double> explicit_seeds;

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Strictly increasing initial positions inside the signal support.
/// Uniform seeds sit at cell midpoints of the lobes (the lobe edges are
/// nodes of psi_0); quantile seeds at midpoint quantiles of |psi_0|^2.
std::vector<double> seed_positions(const EnsembleSpec& spec, const InputSignalSpec& signal,
                                   const SpectralState& state);

/// Parallel map over seeds with a common sample grid.
std::vector<Trajectory> integrate_ensemble(const SpectralState& state,
                                           std::span<const double> seeds,
                                           std::span<const double> sample_times,
                                           const DecoherenceParams& params,
                                           const IntegratorOptions& opts = {});

struct CrossingViolation {
    std::size_t time_index = 0;
    double time = 0.0;
    std::size_t lower = 0;  ///< trajectory index (by seed order) that overtook
    std::size_t upper = 0;
};

struct NoncrossingReport {
    bool ok = true;
    std::optional<CrossingViolation> first_violation;
};

/// Checks that positions keep the seed ordering at every shared sample time.
/// Partial (step-floor) trajectories are checked over the samples they
/// reached; their time axis must be a prefix of the longest one.
NoncrossingReport noncrossing_check(std::span<const Trajectory> trajectories);

} // namespace qcarpet
