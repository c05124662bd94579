#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"

namespace qcarpet {

struct PurityCurve {
    std::vector<double> times;
    std::vector<double> values;
};

/// Tr rho^2 of the energy-damped state (Lambda does not enter).
double purity(const SpectralState& state, double t, const DecoherenceParams& params);

/// sum |c_alpha|^4.
double purity_asymptote(const SpectralState& state);

PurityCurve purity_curve(const SpectralState& state, std::span<const double> times,
                         const DecoherenceParams& params);

/// c_alpha c_alpha' outer product, alpha = 1..n (stored 0-based, row-major).
struct CorrelationMatrix {
    int n = 0;
    std::vector<double> values;

    double at(int alpha, int alpha_prime) const {
        return values[static_cast<std::size_t>(alpha - 1) * n + (alpha_prime - 1)];
    }
    double trace() const;
};

CorrelationMatrix correlation_matrix(const SpectralState& state);

/// 1 / beta_{alpha alpha'}; the diagonal holds +infinity.
struct DecayTimeMap {
    int n = 0;
    std::vector<double> values;

    double at(int alpha, int alpha_prime) const {
        return values[static_cast<std::size_t>(alpha - 1) * n + (alpha_prime - 1)];
    }
};

DecayTimeMap decay_time_map(const CavityConfig& cfg, double gamma, int N);

/// chi(t) = chi0 + sum_i chi_i exp(-(t - t0) / t_i), timescales ascending.
struct PurityFit {
    double chi0 = 0.0;
    std::array<double, 3> amplitudes{};
    std::array<double, 3> timescales{};
    double t0 = 0.0;
    double residual = std::numeric_limits<double>::infinity();  ///< rms over all samples

    double evaluate(double t) const;
};

class FitFailure : public std::runtime_error {
public:
    FitFailure(const std::string& what, std::optional<PurityFit> best)
        : std::runtime_error(what), best_(std::move(best)) {}

    const std::optional<PurityFit>& best() const noexcept { return best_; }

private:
    std::optional<PurityFit> best_;
};

struct FitOptions {
    int restarts = 20;
    int max_iterations = 300;
    std::size_t log_samples = 240;
    unsigned seed = 20240501u;
};

/// Three-exponential fit with t0 pinned to the first sample time.
/// Requires >= 50 samples spanning >= 10 tau and strictly positive values.
PurityFit fit_purity(const PurityCurve& curve, double tau, const FitOptions& opts = {});

struct SweepRow {
    double x0 = 0.0;
    bool ok = false;
    std::string error;
    double chi_inf = 0.0;
    double norm_deficit = 0.0;
    std::optional<PurityFit> fit;
};

struct SweepOptions {
    double span_tau = 10.0;      ///< purity curve length in units of tau
    std::size_t samples = 1001;  ///< purity curve samples
    bool renormalize = false;
    FitOptions fit;
};

/// Per-x0 decomposition, asymptotic purity and fitted timescales. Invalid
/// rows carry an error and do not stop the sweep. Parallel over rows.
std::vector<SweepRow> sweep_x0(SignalKind kind, std::span<const double> x0_values, double w,
                               const CavityConfig& cfg, int N, double gamma,
                               const SweepOptions& opts = {});

/// x0_min, x0_min + step, ... up to x0_max (inclusive within 1e-9 step).
std::vector<double> sweep_range(double x0_min, double x0_max, double step);

} // namespace qcarpet
