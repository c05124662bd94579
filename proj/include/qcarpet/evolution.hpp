#pragma once

#include <complex>

#include "qcarpet/cavity.hpp"

namespace qcarpet {

/// omega_{alpha alpha'} = (E_alpha' - E_alpha) / hbar, requires alpha' >= alpha.
double frequency(int alpha, int alpha_prime, const CavityConfig& cfg);

struct RevivalTimes {
    double t_rev;  ///< 4 m L^2 / (pi hbar)
    double tau;    ///< t_rev / 8
};

RevivalTimes revival_times(const CavityConfig& cfg);

/// Phase E_alpha t / hbar reduced to [0, 2 pi). Computed from the fraction
/// t / T_rev so that whole revival periods cancel exactly.
double mode_phase(int alpha, double t, const CavityConfig& cfg);

/// Phase omega_{alpha alpha'} t reduced to [0, 2 pi), same reduction.
double pair_phase(int alpha, int alpha_prime, double t, const CavityConfig& cfg);

std::complex<double> wavefunction(const SpectralState& state, double x, double t);

/// Coherent density as populations plus cosine coherences (no |psi|^2
/// shortcut). Negative roundoff is clamped to zero.
double probability_density(const SpectralState& state, double x, double t);

} // namespace qcarpet
