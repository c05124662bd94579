#include "qcarpet/energy.hpp"

#include <cmath>
#include <limits>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"

namespace qcarpet {

double purity(const SpectralState& state, double t, const DecoherenceParams& params) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
    params.validate();
    const CavityConfig& cfg = state.cavity();
    const int n = state.size();
    double diagonal = 0.0;
    double cross = 0.0;
    for (int a = 1; a <= n; ++a) {
        const double pa = state.coeff(a) * state.coeff(a);
        diagonal += pa * pa;
        if (pa == 0.0) continue;
        for (int b = a + 1; b <= n; ++b) {
            const double pb = state.coeff(b) * state.coeff(b);
            if (pb == 0.0) continue;
            cross += pa * pb * std::exp(-2.0 * damping_rate(a, b, params, cfg) * t);
        }
    }
    return diagonal + 2.0 * cross;
}

double purity_asymptote(const SpectralState& state) {
    double s = 0.0;
    for (double c : state.coeffs()) s += c * c * c * c;
    return s;
}

PurityCurve purity_curve(const SpectralState& state, std::span<const double> times,
                         const DecoherenceParams& params) {
    PurityCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.values.reserve(times.size());
    for (double t : times) curve.values.push_back(purity(state, t, params));
    return curve;
}

double CorrelationMatrix::trace() const {
    double s = 0.0;
    for (int a = 1; a <= n; ++a) s += at(a, a);
    return s;
}

CorrelationMatrix correlation_matrix(const SpectralState& state) {
    CorrelationMatrix m;
    m.n = state.size();
    const auto c = state.coeffs();
    m.values.resize(c.size() * c.size());
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = 0; b < c.size(); ++b) m.values[a * c.size() + b] = c[a] * c[b];
    return m;
}

DecayTimeMap decay_time_map(const CavityConfig& cfg, double gamma, int N) {
    cfg.validate();
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("decay-time map needs gamma > 0");
    if (N < 1) throw DomainError("truncation N must be >= 1");
    DecayTimeMap m;
    m.n = N;
    m.values.resize(static_cast<std::size_t>(N) * N);
    DecoherenceParams params;
    params.gamma = gamma;
    for (int a = 1; a <= N; ++a) {
        for (int b = 1; b <= N; ++b) {
            m.values[static_cast<std::size_t>(a - 1) * N + (b - 1)] =
                a == b ? std::numeric_limits<double>::infinity()
                       : 1.0 / damping_rate(a, b, params, cfg);
        }
    }
    return m;
}

std::vector<double> sweep_range(double x0_min, double x0_max, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("sweep step must be > 0");
    if (!(x0_max >= x0_min)) throw DomainError("sweep range is empty");
    const auto count = static_cast<std::size_t>(std::floor((x0_max - x0_min) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = x0_min + static_cast<double>(i) * step;
    return out;
}

std::vector<SweepRow> sweep_x0(SignalKind kind, std::span<const double> x0_values, double w,
                               const CavityConfig& cfg, int N, double gamma,
                               const SweepOptions& opts) {
    cfg.validate();
    const double tau = revival_times(cfg).tau;
    const auto times = linspace(0.0, opts.span_tau * tau, opts.samples);
    DecoherenceParams params;
    params.gamma = gamma;
    params.validate();

    std::vector<SweepRow> rows(x0_values.size());
    const auto n = static_cast<std::ptrdiff_t>(x0_values.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        row.x0 = x0_values[static_cast<std::size_t>(i)];
        try {
            const InputSignalSpec spec{kind, row.x0, w};
            SpectralState state = decompose(spec, cfg, N);
            row.norm_deficit = norm_deficit(state);
            if (opts.renormalize) state = state.renormalized();
            row.chi_inf = purity_asymptote(state);
            row.fit = fit_purity(purity_curve(state, times, params), tau, opts.fit);
            row.ok = true;
        } catch (const FitFailure& e) {
            row.error = std::string("fit failed: ") + e.what();
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

} // namespace qcarpet
