#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcarpet/energy.hpp"
#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"

using namespace qcarpet;

namespace {
const CavityConfig kCfg{};
const double kTau = revival_times(kCfg).tau;
const DecoherenceParams kDamped{DecoherenceParams::default_gamma(), LambdaMode::Off, 0.0};
SpectralState single(double x0) { return decompose({SignalKind::Single, x0, 10.0}, kCfg, 50); }
SpectralState twin(double x0) { return decompose({SignalKind::Double, x0, 10.0}, kCfg, 50); }

// sum_ab c_a^2 c_b^2 exp(-2 beta_ab t), straight double loop.
double purity_oracle(const SpectralState& s, double t, double gamma) {
    double sum = 0.0;
    for (int a = 1; a <= s.size(); ++a)
        for (int b = 1; b <= s.size(); ++b) {
            const double w = std::abs(eigenenergy(b, kCfg) - eigenenergy(a, kCfg)) / kCfg.hbar;
            sum += s.coeff(a) * s.coeff(a) * s.coeff(b) * s.coeff(b) * std::exp(-2.0 * gamma * w * t);
        }
    return sum;
}
} // namespace

TEST_CASE("purity against the double loop") {
    for (double x0 : {0.0, 6.0, 18.0}) {
        const auto s = single(x0);
        for (double t : {0.0, 0.3 * kTau, kTau, 7 * kTau})
            CHECK(purity(s, t, kDamped) == doctest::Approx(purity_oracle(s, t, kDamped.gamma)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(purity(single(0.0), -1.0, kDamped), DomainError);
}

TEST_CASE("asymptotic purity values") {
    CHECK(purity_asymptote(single(0.0)) == doctest::Approx(0.2346545154305576).epsilon(1e-12));
    CHECK(purity_asymptote(single(6.0)) == doctest::Approx(0.17599).epsilon(1e-4));
    CHECK(purity_asymptote(single(20.0)) == doctest::Approx(0.15866).epsilon(1e-4));
    CHECK(purity_asymptote(twin(12.5)) == doctest::Approx(purity_asymptote(single(0.0))).epsilon(1e-12));
    CHECK(purity_asymptote(twin(18.0)) / purity_asymptote(single(18.0)) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(purity_asymptote(twin(6.0)) / purity_asymptote(single(6.0)) == doctest::Approx(2.05).epsilon(5e-3));
}

TEST_CASE("property: purity bounds and monotone decay") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pick(-20.0, 20.0);
    for (int trial = 0; trial < 8; ++trial) {
        const auto s = single(pick(rng));
        const double chi0 = purity(s, 0.0, kDamped);
        const double chi_inf = purity_asymptote(s);
        CHECK(chi0 <= 1.0 + 1e-12);
        CHECK(chi0 == doctest::Approx(s.norm() * s.norm()).epsilon(1e-12));
        double prev = chi0;
        for (double t = 0.0; t <= 30 * kTau; t += 0.5 * kTau) {
            const double v = purity(s, t, kDamped);
            CHECK(v <= prev + 1e-15);
            CHECK(v >= chi_inf - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("property: purity depends on gamma t only") {
    const auto s = single(9.0);
    for (double k : {0.5, 2.0, 7.0}) {
        const DecoherenceParams scaled{kDamped.gamma / k, LambdaMode::Off, 0.0};
        for (double t : {0.1 * kTau, kTau, 4 * kTau})
            CHECK(purity(s, k * t, scaled) == doctest::Approx(purity(s, t, kDamped)).epsilon(1e-12));
    }
    CHECK(purity(s, 5 * kTau, DecoherenceParams::coherent()) == doctest::Approx(purity(s, 0.0, kDamped)).epsilon(1e-14));
}

TEST_CASE("correlation matrix") {
    const auto s = single(6.0);
    const auto m = correlation_matrix(s);
    CHECK(m.n == 50);
    CHECK(m.trace() == doctest::Approx(s.norm()).epsilon(1e-14));
    CHECK(m.at(2, 7) == m.at(7, 2));
    CHECK(m.at(3, 4) == s.coeff(3) * s.coeff(4));
}

TEST_CASE("decay-time map") {
    const auto map = decay_time_map(kCfg, kDamped.gamma, 10);
    CHECK(std::isinf(map.at(4, 4)));
    CHECK(map.at(1, 3) == doctest::Approx(497.359197162173).epsilon(1e-12));
    CHECK(map.at(3, 1) == map.at(1, 3));
    CHECK(map.at(1, 2) * 3.0 / 10.0 == doctest::Approx(kTau).epsilon(1e-12));
    CHECK_THROWS_AS(decay_time_map(kCfg, 0.0, 10), DomainError);
}

namespace {
PurityCurve model_curve(double chi0, std::array<double, 3> amp, std::array<double, 3> ts, double span,
                        std::size_t n) {
    PurityCurve c;
    c.times = oracle::uniform(0.0, span, n);
    for (double t : c.times) {
        double v = chi0;
        for (int i = 0; i < 3; ++i) v += amp[i] * std::exp(-t / ts[i]);
        c.values.push_back(v);
    }
    return c;
}
} // namespace

TEST_CASE("fit recovers a synthetic model") {
    const auto c = model_curve(0.25, {0.3, 0.2, 0.25}, {0.3 * kTau, 1.5 * kTau, 6 * kTau}, 20 * kTau, 1001);
    const auto f = fit_purity(c, kTau);
    CHECK(f.chi0 == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(f.timescales[0] == doctest::Approx(0.3 * kTau).epsilon(1e-4));
    CHECK(f.timescales[1] == doctest::Approx(1.5 * kTau).epsilon(1e-4));
    CHECK(f.timescales[2] == doctest::Approx(6 * kTau).epsilon(1e-4));
    CHECK(f.residual < 1e-9);
    CHECK(f.t0 == 0.0);
    CHECK(f.evaluate(3 * kTau) == doctest::Approx(c.values[150]).epsilon(1e-8));
}

TEST_CASE("property: fit ordering and idempotence on a physical curve") {
    const auto s = single(6.0);
    const auto times = oracle::uniform(0.0, 10 * kTau, 1001);
    const auto f = fit_purity(purity_curve(s, times, kDamped), kTau);
    CHECK(f.timescales[0] < f.timescales[1]);
    CHECK(f.timescales[1] < f.timescales[2]);
    CHECK(f.residual < 1e-3);

    PurityCurve again;
    again.times = times;
    for (double t : times) again.values.push_back(f.evaluate(t));
    const auto g = fit_purity(again, kTau);
    CHECK(g.chi0 == doctest::Approx(f.chi0).epsilon(0.01));
    for (int i = 0; i < 3; ++i) {
        CHECK(g.timescales[i] == doctest::Approx(f.timescales[i]).epsilon(0.01));
        CHECK(g.amplitudes[i] == doctest::Approx(f.amplitudes[i]).epsilon(0.01));
    }
}

TEST_CASE("fit preconditions and failures") {
    PurityCurve shortc = model_curve(0.2, {0.3, 0.2, 0.1}, {kTau, 2 * kTau, 3 * kTau}, 20 * kTau, 20);
    CHECK_THROWS_AS(fit_purity(shortc, kTau), FitFailure);
    PurityCurve narrow = model_curve(0.2, {0.3, 0.2, 0.1}, {kTau, 2 * kTau, 3 * kTau}, 5 * kTau, 200);
    CHECK_THROWS_AS(fit_purity(narrow, kTau), FitFailure);
    PurityCurve negative = model_curve(-0.5, {0.3, 0.2, 0.1}, {kTau, 2 * kTau, 3 * kTau}, 20 * kTau, 200);
    CHECK_THROWS_AS(fit_purity(negative, kTau), FitFailure);
    try {
        fit_purity(negative, kTau);
    } catch (const FitFailure& e) {
        CHECK_FALSE(e.best().has_value());
    }
    PurityCurve flat = model_curve(0.4, {0.0, 0.0, 0.0}, {kTau, 2 * kTau, 3 * kTau}, 20 * kTau, 200);
    CHECK_THROWS_AS(fit_purity(flat, kTau), FitFailure);
}

TEST_CASE("sweep") {
    const auto xs = sweep_range(0.0, 20.0, 0.5);
    CHECK(xs.size() == 41);
    CHECK(xs.back() == 20.0);
    SweepOptions opts;
    opts.samples = 201;
    const std::vector<double> x0s{0.0, 12.5, 21.0};
    const auto rows = sweep_x0(SignalKind::Single, x0s, 10.0, kCfg, 50, kDamped.gamma, opts);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ok);
    CHECK(rows[0].chi_inf == doctest::Approx(0.2346545154305576).epsilon(1e-12));
    CHECK(rows[0].fit.has_value());
    CHECK(rows[1].ok);
    CHECK_FALSE(rows[2].ok);
    CHECK_FALSE(rows[2].error.empty());
}
