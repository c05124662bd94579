#pragma once

#include <complex>
#include <vector>

#include "qcarpet/cavity.hpp"

namespace qcarpet {

enum class LambdaMode { Off, Formula, Explicit };

/// Controls of the effective damping model
///   D(x, x'; t) = exp(-gamma omega t - Lambda (x - x')^2 t).
struct DecoherenceParams {
    double gamma = 0.0;
    LambdaMode lambda_mode = LambdaMode::Off;
    double lambda = 0.0;  ///< used only when lambda_mode == Explicit

    static DecoherenceParams coherent() { return {}; }
    /// gamma = 2/(5 pi): beta tau = (alpha'^2 - alpha^2) / 10.
    static double default_gamma();

    void validate() const;

    /// Lambda in force for a given cavity (formula: 2 pi hbar / (m L^3)).
    double effective_lambda(const CavityConfig& cfg) const;

    bool is_coherent() const noexcept { return gamma == 0.0 && lambda_mode == LambdaMode::Off; }

    friend bool operator==(const DecoherenceParams&, const DecoherenceParams&) = default;
};

double localization_rate(const CavityConfig& cfg);

/// beta_{alpha alpha'} = gamma omega_{alpha alpha'}; symmetric in its indices.
double damping_rate(int alpha, int alpha_prime, const DecoherenceParams& params,
                    const CavityConfig& cfg);

double damping_factor(int alpha, int alpha_prime, double x, double x_prime, double t,
                      const DecoherenceParams& params, const CavityConfig& cfg);

std::complex<double> density_matrix(const SpectralState& state, double x, double x_prime,
                                    double t, const DecoherenceParams& params);

/// Diagonal of the damped density matrix. Independent of Lambda.
double decohered_density(const SpectralState& state, double x, double t,
                         const DecoherenceParams& params);

/// Long-time limit: sum |c_alpha|^2 phi_alpha(x)^2.
double asymptotic_density(const SpectralState& state, double x);

/// rho(x, x'; t) sampled on x_points (rows) by x_prime_points (columns).
struct DensityMatrixGrid {
    std::vector<double> x_points;
    std::vector<double> x_prime_points;
    double t = 0.0;
    std::vector<std::complex<double>> values;  ///< row-major

    std::complex<double> at(std::size_t i, std::size_t j) const {
        return values[i * x_prime_points.size() + j];
    }
};

} // namespace qcarpet
