#pragma once

#include <complex>
#include <vector>

#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"

namespace qcarpet {

inline constexpr double kDensityFloor = 1e-12;

/// Density and probability current at one (x, t).
struct FlowSample {
    double density = 0.0;
    double current = 0.0;  ///< J = (hbar/m) * sum_{a<b} c_a c_b W_ab sin(w t) e^{-beta t}
};

/// O(N) evaluator for the damped pair sums over a modal state.
///
/// Pair weights exp(-beta_ab t) = exp(-kappa (b^2 - a^2)) factor along the
/// ordered mode index, so every sum over a < b is carried by a running
/// prefix that is multiplied by exp(-kappa (2b + 1)) when b advances. The
/// prefix only ever shrinks, so large kappa underflows to zero instead of
/// overflowing.
class ModalSeries {
public:
    /// Per-time data: mode phases e^{i E_a t / hbar} and prefix decay steps.
    class TimeSlice {
    public:
        double t() const noexcept { return t_; }

    private:
        friend class ModalSeries;
        double t_ = 0.0;
        std::vector<std::complex<double>> phase_;
        std::vector<double> step_decay_;
    };

    ModalSeries(const SpectralState& state, const DecoherenceParams& params);

    TimeSlice slice(double t) const;
    void fill_slice(double t, TimeSlice& out) const;

    double density(double x, const TimeSlice& ts) const;
    FlowSample flow(double x, const TimeSlice& ts) const;

    /// Velocity J / rho. Throws NodeProximity when rho < kDensityFloor.
    double velocity(double x, const TimeSlice& ts) const;

    double density(double x, double t) const { return density(x, slice(t)); }
    double velocity(double x, double t) const { return velocity(x, slice(t)); }

    const CavityConfig& cavity() const noexcept { return cfg_; }
    int size() const noexcept { return static_cast<int>(coeffs_.size()); }

private:
    CavityConfig cfg_;
    std::vector<double> coeffs_;
    double gamma_;
    double t_rev_;
    double norm_;       // sqrt(2/L)
    double k1_;         // pi/L
    double hbar_over_m_;
};

} // namespace qcarpet
