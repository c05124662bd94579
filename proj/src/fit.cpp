#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "qcarpet/energy.hpp"

namespace qcarpet {

double PurityFit::evaluate(double t) const {
    double v = chi0;
    for (std::size_t i = 0; i < 3; ++i) v += amplitudes[i] * std::exp(-(t - t0) / timescales[i]);
    return v;
}

namespace {

using Vec3 = Eigen::Vector3d;

// Variable projection: the baseline and amplitudes enter linearly, so for
// fixed log-timescales they come from a least-squares solve and only the
// three timescales are iterated.
class Projection {
public:
    Projection(std::vector<double> dt, std::vector<double> y)
        : dt_(Eigen::Map<Eigen::VectorXd>(dt.data(), static_cast<Eigen::Index>(dt.size()))),
          y_(Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))) {}

    Eigen::Index size() const { return y_.size(); }

    Eigen::Vector4d linear(const Vec3& log_t) const { return solve(design(log_t)); }

    Eigen::VectorXd residual(const Vec3& log_t) const {
        const Eigen::MatrixXd a = design(log_t);
        return a * solve(a) - y_;
    }

private:
    Eigen::MatrixXd design(const Vec3& log_t) const {
        Eigen::MatrixXd a(y_.size(), 4);
        a.col(0).setOnes();
        for (int i = 0; i < 3; ++i) a.col(i + 1) = (-dt_.array() / std::exp(log_t[i])).exp().matrix();
        return a;
    }
    Eigen::Vector4d solve(const Eigen::MatrixXd& a) const {
        return a.colPivHouseholderQr().solve(y_);
    }

    Eigen::VectorXd dt_;
    Eigen::VectorXd y_;
};

struct Candidate {
    Vec3 log_t;
    double cost = std::numeric_limits<double>::infinity();
};

Candidate levenberg_marquardt(const Projection& proj, Vec3 p, int max_iterations) {
    Eigen::VectorXd r = proj.residual(p);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    constexpr double kDiff = 1e-6;

    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::MatrixXd jac(proj.size(), 3);
        for (int i = 0; i < 3; ++i) {
            Vec3 hi = p, lo = p;
            hi[i] += kDiff;
            lo[i] -= kDiff;
            jac.col(i) = (proj.residual(hi) - proj.residual(lo)) / (2.0 * kDiff);
        }
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Vec3 g = jac.transpose() * r;

        bool improved = false;
        while (mu < 1e14) {
            Eigen::Matrix3d damped = jtj;
            for (int i = 0; i < 3; ++i) damped(i, i) += mu * std::max(jtj(i, i), 1e-30);
            const Vec3 step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                mu *= 4.0;
                continue;
            }
            const Vec3 trial = p + step;
            const Eigen::VectorXd r_trial = proj.residual(trial);
            const double c_trial = r_trial.squaredNorm();
            if (std::isfinite(c_trial) && c_trial < cost) {
                const double gain = cost - c_trial;
                p = trial;
                r = r_trial;
                cost = c_trial;
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
                if (gain <= 1e-15 * cost || step.cwiseAbs().maxCoeff() < 1e-12) return {p, cost};
                break;
            }
            mu *= 4.0;
        }
        if (!improved) break;
    }
    return {p, cost};
}

std::vector<std::size_t> log_spaced_indices(const std::vector<double>& times, std::size_t target) {
    const double t0 = times.front();
    const double span = times.back() - t0;
    std::vector<std::size_t> idx{0};
    for (std::size_t j = 0; j < target; ++j) {
        const double frac = -3.0 + 3.0 * static_cast<double>(j) / static_cast<double>(target - 1);
        const double t = t0 + span * std::pow(10.0, frac);
        auto it = std::lower_bound(times.begin(), times.end(), t);
        std::size_t i = static_cast<std::size_t>(it - times.begin());
        if (i == times.size()) i = times.size() - 1;
        if (i > 0 && t - times[i - 1] < times[i] - t) --i;
        idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

PurityFit assemble(const Projection& proj, const Candidate& best, const PurityCurve& curve) {
    const Eigen::Vector4d lin = proj.linear(best.log_t);
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return best.log_t[a] < best.log_t[b]; });
    PurityFit fit;
    fit.t0 = curve.times.front();
    fit.chi0 = lin[0];
    for (std::size_t i = 0; i < 3; ++i) {
        fit.timescales[i] = std::exp(best.log_t[static_cast<Eigen::Index>(order[i])]);
        fit.amplitudes[i] = lin[static_cast<Eigen::Index>(order[i]) + 1];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double d = fit.evaluate(curve.times[i]) - curve.values[i];
        ss += d * d;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(curve.times.size()));
    return fit;
}

} // namespace

PurityFit fit_purity(const PurityCurve& curve, double tau, const FitOptions& opts) {
    const auto& t = curve.times;
    const auto& y = curve.values;
    if (t.size() != y.size()) throw FitFailure("times and values differ in length", std::nullopt);
    if (t.size() < 50) throw FitFailure("purity fit needs at least 50 samples", std::nullopt);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || (i > 0 && !(t[i] > t[i - 1])))
            throw FitFailure("sample times must be finite and strictly increasing", std::nullopt);
        if (!(y[i] > 0.0) || !std::isfinite(y[i]))
            throw FitFailure("purity values must be finite and strictly positive", std::nullopt);
    }
    const double span = t.back() - t.front();
    if (!(tau > 0.0) || span < 10.0 * tau * (1.0 - 1e-9))
        throw FitFailure("purity fit needs a curve spanning at least 10 tau", std::nullopt);
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*hi - *lo <= 1e-12 * *hi) throw FitFailure("curve has no decay to fit", std::nullopt);

    const auto idx = log_spaced_indices(t, std::max<std::size_t>(opts.log_samples, 8));
    std::vector<double> dt, yy;
    for (std::size_t i : idx) {
        dt.push_back(t[i] - t.front());
        yy.push_back(y[i]);
    }
    const Projection proj(std::move(dt), std::move(yy));

    const Vec3 base(std::log(span / 100.0), std::log(span / 10.0), std::log(span));
    std::mt19937 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    Candidate best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        Vec3 start = base;
        if (r > 0)
            for (int i = 0; i < 3; ++i) start[i] += jitter(rng);
        const Candidate c = levenberg_marquardt(proj, start, opts.max_iterations);
        if (c.cost < best.cost) best = c;
    }
    if (!std::isfinite(best.cost)) throw FitFailure("no restart produced a finite fit", std::nullopt);

    PurityFit fit = assemble(proj, best, curve);
    const auto& ts = fit.timescales;
    const bool ordered = ts[0] > 0.0 && ts[1] > ts[0] * (1.0 + 1e-9) && ts[2] > ts[1] * (1.0 + 1e-9);
    if (!ordered) throw FitFailure("fitted timescales are degenerate", fit);
    if (!(fit.chi0 > 0.0)) throw FitFailure("fitted baseline is not positive", fit);
    return fit;
}

} // namespace qcarpet
