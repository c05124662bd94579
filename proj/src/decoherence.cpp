#include "qcarpet/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"

namespace qcarpet {

namespace {

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

std::vector<double> weighted_modes(const SpectralState& state, double x) {
    const CavityConfig& cfg = state.cavity();
    std::vector<double> u(static_cast<std::size_t>(state.size()));
    for (int a = 1; a <= state.size(); ++a) u[a - 1] = state.coeff(a) * eigenmode(a, x, cfg);
    return u;
}

} // namespace

double DecoherenceParams::default_gamma() { return 2.0 / (5.0 * std::numbers::pi); }

void DecoherenceParams::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("deco.gamma must be >= 0");
    if (lambda_mode == LambdaMode::Explicit && (!(lambda >= 0.0) || !std::isfinite(lambda)))
        throw DomainError("deco.lambda must be >= 0");
}

double DecoherenceParams::effective_lambda(const CavityConfig& cfg) const {
    switch (lambda_mode) {
    case LambdaMode::Off: return 0.0;
    case LambdaMode::Formula: return localization_rate(cfg);
    case LambdaMode::Explicit: return lambda;
    }
    return 0.0;
}

double localization_rate(const CavityConfig& cfg) {
    return 2.0 * std::numbers::pi * cfg.hbar / (cfg.m * cfg.L * cfg.L * cfg.L);
}

double damping_rate(int alpha, int alpha_prime, const DecoherenceParams& params,
                    const CavityConfig& cfg) {
    const auto [lo, hi] = std::minmax(alpha, alpha_prime);
    return params.gamma * frequency(lo, hi, cfg);
}

double damping_factor(int alpha, int alpha_prime, double x, double x_prime, double t,
                      const DecoherenceParams& params, const CavityConfig& cfg) {
    check_time(t);
    check_in_box(x, cfg);
    check_in_box(x_prime, cfg);
    const double d = x - x_prime;
    return std::exp(-damping_rate(alpha, alpha_prime, params, cfg) * t -
                    params.effective_lambda(cfg) * d * d * t);
}

std::complex<double> density_matrix(const SpectralState& state, double x, double x_prime, double t,
                                    const DecoherenceParams& params) {
    const CavityConfig& cfg = state.cavity();
    check_in_box(x, cfg);
    check_in_box(x_prime, cfg);
    check_time(t);
    const auto u = weighted_modes(state, x);
    const auto v = weighted_modes(state, x_prime);
    const int n = state.size();

    std::complex<double> sum{0.0, 0.0};
    for (int a = 1; a <= n; ++a) {
        if (u[a - 1] == 0.0) continue;
        for (int b = 1; b <= n; ++b) {
            if (v[b - 1] == 0.0) continue;
            // e^{-i (E_a - E_b) t / hbar}: +omega_ab t when a < b.
            double phase = 0.0;
            if (a < b) phase = pair_phase(a, b, t, cfg);
            else if (a > b) phase = -pair_phase(b, a, t, cfg);
            const double damp = std::exp(-damping_rate(a, b, params, cfg) * t);
            sum += u[a - 1] * v[b - 1] * damp * std::polar(1.0, phase);
        }
    }
    const double d = x - x_prime;
    return sum * std::exp(-params.effective_lambda(cfg) * d * d * t);
}

double decohered_density(const SpectralState& state, double x, double t,
                         const DecoherenceParams& params) {
    const CavityConfig& cfg = state.cavity();
    check_in_box(x, cfg);
    check_time(t);
    const auto u = weighted_modes(state, x);
    const int n = state.size();
    double populations = 0.0;
    double coherences = 0.0;
    for (int a = 1; a <= n; ++a) {
        populations += u[a - 1] * u[a - 1];
        if (u[a - 1] == 0.0) continue;
        for (int b = a + 1; b <= n; ++b) {
            if (u[b - 1] == 0.0) continue;
            coherences += u[a - 1] * u[b - 1] * std::cos(pair_phase(a, b, t, cfg)) *
                          std::exp(-damping_rate(a, b, params, cfg) * t);
        }
    }
    return std::max(0.0, populations + 2.0 * coherences);
}

double asymptotic_density(const SpectralState& state, double x) {
    check_in_box(x, state.cavity());
    double s = 0.0;
    for (double u : weighted_modes(state, x)) s += u * u;
    return s;
}

} // namespace qcarpet
