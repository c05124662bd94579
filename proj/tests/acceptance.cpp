// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "qcarpet/bohmian.hpp"
#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"
#include "qcarpet/energy.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/kernels.hpp"

using namespace qcarpet;

namespace {

const CavityConfig kCfg{};
const double kTau = revival_times(kCfg).tau;
const double kTrev = revival_times(kCfg).t_rev;
const double kGamma = DecoherenceParams::default_gamma();

SpectralState single(double x0) { return decompose({SignalKind::Single, x0, 10.0}, kCfg, 50); }
SpectralState twin(double x0) { return decompose({SignalKind::Double, x0, 10.0}, kCfg, 50); }

struct Outcome {
    bool pass;
    std::string detail;
};

double simpson_odd(const std::vector<double>& y, double h) {
    double s = y.front() + y.back();
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
    return s * h / 3.0;
}

double revival_error(const SpectralState& s, double t, bool mirror) {
    double worst = 0.0;
    for (double x : linspace(-25.0, 25.0, 1001))
        worst = std::max(worst, std::abs(probability_density(s, x, t) - probability_density(s, mirror ? -x : x, 0.0)));
    return worst;
}

Outcome c1() {
    const double e = revival_error(single(20.0), kTrev, false);
    return {e < 1e-10, fmt::format("max err {:.3e}", e)};
}

Outcome c2() {
    double worst = revival_error(single(0.0), kTau, false);
    for (double x0 : {5.0, 8.0, 12.5, 15.0, 18.0, 20.0}) worst = std::max(worst, revival_error(twin(x0), kTau, false));
    return {worst < 1e-10, fmt::format("max err {:.3e} over x0=0 single + 6 double states", worst)};
}

Outcome c3() {
    const double e = revival_error(single(20.0), 0.5 * kTrev, true);
    return {e < 1e-10, fmt::format("max err {:.3e}", e)};
}

Outcome c4() {
    const std::size_t n = 20001;
    const auto xs = linspace(-25.0, 25.0, n);
    const double h = 50.0 / static_cast<double>(n - 1);
    double worst = 0.0;
    for (double x0 : {0.0, 6.0, 12.5, 18.0, 20.0}) {
        for (SignalKind kind : {SignalKind::Single, SignalKind::Double}) {
            const InputSignalSpec spec{kind, x0, 10.0};
            if (kind == SignalKind::Double && x0 < 5.0) continue;
            const auto analytic = decompose(spec, kCfg, 50);
            for (int a = 1; a <= 50; ++a) {
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) y[i] = eigenmode(a, xs[i], kCfg) * spec.amplitude(xs[i]);
                worst = std::max(worst, std::abs(simpson_odd(y, h) - analytic.coeff(a)));
            }
        }
    }
    const double c5 = single(0.0).coeff(5);
    const bool ok = worst < 1e-8 && std::abs(c5 - std::sqrt(0.2)) < 1e-12;
    return {ok, fmt::format("max |analytic - quadrature| {:.3e}, c5(x0=0) = {:.6f}", worst, c5)};
}

Outcome c5() {
    const auto s = single(0.0);
    const DecoherenceParams p{kGamma, LambdaMode::Off, 0.0};
    const std::size_t n = 401;  // 400 intervals
    const auto xs = linspace(-25.0, 25.0, n);
    const double h = 50.0 / static_cast<double>(n - 1);
    double worst = 0.0;
    for (double t : {0.0, kTau, 5 * kTau}) {
        const auto m = density_matrix_grid(s, xs, xs, t, p);
        std::vector<double> inner(n), row(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) row[j] = std::norm(m.at(i, j));
            inner[i] = simpson_odd(row, h);
        }
        worst = std::max(worst, std::abs(simpson_odd(inner, h) - purity(s, t, p)));
    }
    return {worst < 2e-3, fmt::format("max |closed form - quadrature| {:.3e}", worst)};
}

Outcome c6() {
    const double a = purity_asymptote(single(0.0));
    const double b = purity_asymptote(twin(12.5));
    const double ratio = purity_asymptote(twin(18.0)) / purity_asymptote(single(18.0));
    const bool ok = a >= 0.20 && a <= 0.25 && std::abs(a - b) < 1e-9 && ratio >= 1.7 && ratio <= 2.1;
    return {ok, fmt::format("chi_inf(single,0) = {:.6f}, |double(12.5) - single(0)| = {:.1e}, ratio(18) = {:.4f}", a, std::abs(a - b), ratio)};
}

Outcome c7() {
    const auto s = single(0.0);
    const DecoherenceParams p{kGamma, LambdaMode::Formula, 0.0};
    double worst = 0.0;
    for (double x : linspace(-25.0, 25.0, 2001))
        worst = std::max(worst, std::abs(decohered_density(s, x, 20 * kTau, p) - asymptotic_density(s, x)));
    return {worst < 1e-6, fmt::format("sup err {:.3e}", worst)};
}

Outcome c8() {
    const DecoherenceParams p{kGamma, LambdaMode::Off, 0.0};
    double worst = 0.0;
    for (int a = 1; a <= 10; ++a)
        for (int b = a; b <= 10; ++b)
            worst = std::max(worst, std::abs(damping_rate(a, b, p, kCfg) * kTau - (b * b - a * a) / 10.0));
    return {worst < 1e-12, fmt::format("max err {:.3e}", worst)};
}

Outcome c9() {
    const auto s = single(0.0);
    const double t = 20 * kTau;
    const DecoherenceParams off{kGamma, LambdaMode::Off, 0.0};
    const DecoherenceParams on{kGamma, LambdaMode::Formula, 0.0};
    const double r_off = std::abs(density_matrix(s, 10, -10, t, off).real()) / std::abs(density_matrix(s, 10, 10, t, off).real());
    const double r_on = std::abs(density_matrix(s, 10, -10, t, on).real()) / std::abs(density_matrix(s, 10, 10, t, on).real());
    return {r_off > 0.1 && r_on < 1e-3, fmt::format("ratio without Lambda {:.4f}, with Lambda {:.3e}", r_off, r_on)};
}

Outcome c10() {
    const InputSignalSpec signal{SignalKind::Single, 0.0, 10.0};
    const auto s = decompose(signal, kCfg, 50);
    const auto seeds = seed_positions({50, Seeding::Uniform, {}}, signal, s);

    const auto coh_times = linspace(0.0, kTrev, 801);
    const auto coh = integrate_ensemble(s, seeds, coh_times, DecoherenceParams::coherent());
    const auto dec_times = linspace(0.0, 20 * kTau, 801);  // 19 tau is index 760
    const auto dec = integrate_ensemble(s, seeds, dec_times, {kGamma, LambdaMode::Formula, 0.0});

    bool complete = true;
    double ret = 0.0, drift = 0.0;
    for (const auto& tr : coh) {
        complete = complete && tr.status == TrajectoryStatus::Completed && tr.x.size() == coh_times.size();
        if (!tr.x.empty()) ret = std::max(ret, std::abs(tr.x.back() - tr.x0));
    }
    for (const auto& tr : dec) {
        complete = complete && tr.status == TrajectoryStatus::Completed && tr.x.size() == dec_times.size();
        if (tr.x.size() == dec_times.size()) drift = std::max(drift, std::abs(tr.x[800] - tr.x[760]));
    }
    const bool nc = noncrossing_check(coh).ok && noncrossing_check(dec).ok;
    return {complete && nc && ret < 1e-3 && drift < 1e-3,
            fmt::format("completed {}, noncrossing {}, max return err {:.3e}, max drift 19-20 tau {:.3e}",
                        complete, nc, ret, drift)};
}

Outcome c11() {
    struct Set {
        double chi0;
        std::array<double, 3> amp;
        std::array<double, 3> ts;
    };
    const std::vector<Set> sets{
        {0.24, {0.30, 0.25, 0.21}, {0.2 * kTau, 1.0 * kTau, 4.0 * kTau}},
        {0.30, {0.20, 0.30, 0.20}, {0.4 * kTau, 1.0 * kTau, 2.0 * kTau}},
        {0.20, {0.35, 0.25, 0.20}, {0.1 * kTau, 0.7 * kTau, 5.0 * kTau}},
    };
    double worst = 0.0;
    std::string failure;
    for (const auto& set : sets) {
        PurityCurve c;
        c.times = linspace(0.0, 20 * kTau, 2001);
        for (double t : c.times) {
            double v = set.chi0;
            for (int i = 0; i < 3; ++i) v += set.amp[i] * std::exp(-t / set.ts[i]);
            c.values.push_back(v);
        }
        try {
            const auto f = fit_purity(c, kTau);
            worst = std::max(worst, std::abs(f.chi0 - set.chi0) / set.chi0);
            for (int i = 0; i < 3; ++i) {
                worst = std::max(worst, std::abs(f.amplitudes[i] - set.amp[i]) / set.amp[i]);
                worst = std::max(worst, std::abs(f.timescales[i] - set.ts[i]) / set.ts[i]);
            }
        } catch (const FitFailure& e) {
            failure = e.what();
            worst = 1.0;
        }
    }
    double rms = 1.0;
    try {
        const auto s = single(0.0);
        const auto times = linspace(0.0, 10 * kTau, 1001);
        const auto f = fit_purity(purity_curve(s, times, {kGamma, LambdaMode::Off, 0.0}), kTau);
        rms = f.residual;
    } catch (const FitFailure& e) {
        failure = e.what();
    }
    return {worst < 0.05 && rms < 1e-3,
            fmt::format("max relative parameter err {:.3e}, x0=0 rms {:.3e}{}", worst, rms,
                        failure.empty() ? "" : " (" + failure + ")")};
}

Outcome c12() {
    const auto s = single(6.0);
    const DecoherenceParams p{kGamma, LambdaMode::Formula, 0.0};
    const auto xs = linspace(-25.0, 25.0, 101);
    double herm = 0.0;
    for (double t : {0.0, kTau, 20 * kTau}) {
        const auto m = density_matrix_grid(s, xs, xs, t, p);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < xs.size(); ++j)
                herm = std::max(herm, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
    }
    const std::size_t n = 4001;
    const auto fine = linspace(-25.0, 25.0, n);
    const double h = 50.0 / static_cast<double>(n - 1);
    auto trace = [&](double t) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = decohered_density(s, fine[i], t, p);
        return simpson_odd(y, h);
    };
    const double t0 = trace(0.0);
    double drift = 0.0;
    for (double t : {0.5 * kTau, kTau, 3 * kTau, 10 * kTau, 20 * kTau}) drift = std::max(drift, std::abs(trace(t) - t0));
    return {herm < 1e-12 && drift < 1e-6, fmt::format("max hermiticity err {:.3e}, max trace drift {:.3e}", herm, drift)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"revival exactness (x0=20, T_rev)", c1},
        {"symmetric revival at tau", c2},
        {"mirror recurrence at T_rev/2", c3},
        {"coefficient oracle", c4},
        {"purity closed form vs quadrature", c5},
        {"asymptotic purity values", c6},
        {"decoherence limit at 20 tau", c7},
        {"damping calibration", c8},
        {"secondary-diagonal suppression", c9},
        {"trajectory properties", c10},
        {"fit recovery", c11},
        {"hermiticity and trace", c12},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += o.pass ? 0 : 1;
        fmt::print("{} {:2d} {}: {} [{:.2f} s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail, secs);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
