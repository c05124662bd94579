#include "qcarpet/modal_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"

namespace qcarpet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

ModalSeries::ModalSeries(const SpectralState& state, const DecoherenceParams& params)
    : cfg_(state.cavity()),
      coeffs_(state.coeffs().begin(), state.coeffs().end()),
      gamma_(params.gamma),
      t_rev_(revival_times(state.cavity()).t_rev),
      norm_(std::sqrt(2.0 / state.cavity().L)),
      k1_(std::numbers::pi / state.cavity().L),
      hbar_over_m_(state.cavity().hbar / state.cavity().m) {
    params.validate();
}

ModalSeries::TimeSlice ModalSeries::slice(double t) const {
    TimeSlice ts;
    fill_slice(t, ts);
    return ts;
}

void ModalSeries::fill_slice(double t, TimeSlice& out) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
    const std::size_t n = coeffs_.size();
    out.t_ = t;
    out.phase_.resize(n);
    out.step_decay_.resize(n);
    const double s = t / t_rev_;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(i + 1);
        out.phase_[i] = std::polar(1.0, kTwoPi * std::fmod(a * a * s, 1.0));
    }
    // beta_ab t = kappa (b^2 - a^2); moving the prefix from b to b + 1
    // multiplies by exp(-kappa (2b + 1)).
    const double kappa = gamma_ * kTwoPi * s;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = static_cast<double>(i + 1);
        out.step_decay_[i] = kappa == 0.0 ? 1.0 : std::exp(-kappa * (2.0 * b + 1.0));
    }
}

namespace {

// Walks modes b = 1..N with e^{i b pi x / L} advanced by repeated
// multiplication. Odd b is a cosine mode, even b a sine mode.
template <bool WithCurrent>
FlowSample accumulate(std::span<const double> coeffs, double x, double norm, double k1,
                      const std::vector<std::complex<double>>& phase,
                      const std::vector<double>& step_decay) {
    const std::complex<double> step = std::polar(1.0, k1 * x);
    std::complex<double> z = step;
    std::complex<double> prefix_u{0.0, 0.0};
    std::complex<double> prefix_du{0.0, 0.0};
    double populations = 0.0;
    double cross = 0.0;
    double numerator = 0.0;

    const std::size_t n = coeffs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double b = static_cast<double>(i + 1);
        const bool cosine = (i % 2) == 0;
        const double c = coeffs[i];
        const double u = c * norm * (cosine ? z.real() : z.imag());
        const std::complex<double> back = std::conj(phase[i]);

        populations += u * u;
        cross += u * (back * prefix_u).real();
        if constexpr (WithCurrent) {
            const double du = c * norm * b * k1 * (cosine ? -z.imag() : z.real());
            numerator += du * (back * prefix_u).imag() - u * (back * prefix_du).imag();
            prefix_du = (prefix_du + du * phase[i]) * step_decay[i];
        }
        prefix_u = (prefix_u + u * phase[i]) * step_decay[i];
        z *= step;
    }
    return {populations + 2.0 * cross, numerator};
}

} // namespace

double ModalSeries::density(double x, const TimeSlice& ts) const {
    check_in_box(x, cfg_);
    const FlowSample s =
        accumulate<false>(coeffs_, x, norm_, k1_, ts.phase_, ts.step_decay_);
    return std::max(0.0, s.density);
}

FlowSample ModalSeries::flow(double x, const TimeSlice& ts) const {
    check_in_box(x, cfg_);
    FlowSample s = accumulate<true>(coeffs_, x, norm_, k1_, ts.phase_, ts.step_decay_);
    s.density = std::max(0.0, s.density);
    s.current *= hbar_over_m_;
    return s;
}

double ModalSeries::velocity(double x, const TimeSlice& ts) const {
    const FlowSample s = flow(x, ts);
    if (!(s.density >= kDensityFloor)) throw NodeProximity(x, ts.t(), s.density);
    return s.current / s.density;
}

} // namespace qcarpet
