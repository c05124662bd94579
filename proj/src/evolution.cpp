#include "qcarpet/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qcarpet/error.hpp"

namespace qcarpet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

double reduced_phase(double integer_multiplier, double t, const CavityConfig& cfg) {
    const double s = t / revival_times(cfg).t_rev;
    return kTwoPi * std::fmod(integer_multiplier * s, 1.0);
}

} // namespace

double frequency(int alpha, int alpha_prime, const CavityConfig& cfg) {
    if (alpha < 1) throw DomainError("mode index must be >= 1");
    if (alpha_prime < alpha) throw DomainError("frequency requires alpha' >= alpha");
    const double gap = static_cast<double>(alpha_prime) * alpha_prime -
                       static_cast<double>(alpha) * alpha;
    return kTwoPi * (std::numbers::pi * cfg.hbar / (4.0 * cfg.m * cfg.L * cfg.L)) * gap;
}

RevivalTimes revival_times(const CavityConfig& cfg) {
    const double t_rev = 4.0 * cfg.m * cfg.L * cfg.L / (std::numbers::pi * cfg.hbar);
    return {t_rev, t_rev / 8.0};
}

double mode_phase(int alpha, double t, const CavityConfig& cfg) {
    if (alpha < 1) throw DomainError("mode index must be >= 1");
    check_time(t);
    return reduced_phase(static_cast<double>(alpha) * alpha, t, cfg);
}

double pair_phase(int alpha, int alpha_prime, double t, const CavityConfig& cfg) {
    if (alpha < 1 || alpha_prime < alpha) throw DomainError("pair phase requires alpha' >= alpha >= 1");
    check_time(t);
    const double gap = static_cast<double>(alpha_prime) * alpha_prime -
                       static_cast<double>(alpha) * alpha;
    return reduced_phase(gap, t, cfg);
}

std::complex<double> wavefunction(const SpectralState& state, double x, double t) {
    const CavityConfig& cfg = state.cavity();
    check_in_box(x, cfg);
    check_time(t);
    std::complex<double> psi{0.0, 0.0};
    for (int a = 1; a <= state.size(); ++a) {
        const double c = state.coeff(a);
        if (c == 0.0) continue;
        psi += c * eigenmode(a, x, cfg) * std::polar(1.0, -mode_phase(a, t, cfg));
    }
    return psi;
}

double probability_density(const SpectralState& state, double x, double t) {
    const CavityConfig& cfg = state.cavity();
    check_in_box(x, cfg);
    check_time(t);
    const int n = state.size();
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int a = 1; a <= n; ++a) u[a - 1] = state.coeff(a) * eigenmode(a, x, cfg);

    double populations = 0.0;
    double coherences = 0.0;
    for (int a = 1; a <= n; ++a) {
        populations += u[a - 1] * u[a - 1];
        for (int b = a + 1; b <= n; ++b) {
            if (u[a - 1] == 0.0 || u[b - 1] == 0.0) continue;
            coherences += u[a - 1] * u[b - 1] * std::cos(pair_phase(a, b, t, cfg));
        }
    }
    return std::max(0.0, populations + 2.0 * coherences);
}

} // namespace qcarpet
