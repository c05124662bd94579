#include "qcarpet/bohmian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/modal_series.hpp"

namespace qcarpet {

double velocity(const SpectralState& state, double x, double t, const DecoherenceParams& params) {
    const ModalSeries series(state, params);
    return series.velocity(x, t);
}

const char* to_string(TrajectoryStatus s) noexcept {
    return s == TrajectoryStatus::Completed ? "completed" : "step-floor-hit";
}

const char* to_string(Seeding s) noexcept {
    switch (s) {
    case Seeding::Uniform: return "uniform";
    case Seeding::Quantile: return "quantile";
    case Seeding::Explicit: return "explicit";
    }
    return "uniform";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Fifth-order weights minus embedded fourth-order weights.
constexpr std::array<double, 7> kE{71.0 / 57600,  0.0,         -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

class FlowField {
public:
    FlowField(const SpectralState& state, const DecoherenceParams& params)
        : series_(state, params), half_(state.cavity().half_width()) {}

    // False when x leaves the box or the density drops below the floor.
    bool eval(double t, double x, double& v) {
        if (!(std::abs(x) <= half_)) return false;
        series_.fill_slice(t, slice_);
        const FlowSample s = series_.flow(x, slice_);
        if (!(s.density >= kDensityFloor)) return false;
        v = s.current / s.density;
        return std::isfinite(v);
    }

private:
    ModalSeries series_;
    ModalSeries::TimeSlice slice_;
    double half_;
};

Trajectory integrate(const SpectralState& state, double x0, std::span<const double> sample_times,
                     double t_end, bool record_steps, const DecoherenceParams& params,
                     const IntegratorOptions& opts) {
    const CavityConfig& cfg = state.cavity();
    check_in_box(x0, cfg);
    if (!(opts.tol > 0.0)) throw DomainError("integration tolerance must be > 0");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!(sample_times[i] >= 0.0) || (i > 0 && !(sample_times[i] > sample_times[i - 1])))
            throw DomainError("sample times must be >= 0 and strictly increasing");
    }

    const double tau = revival_times(cfg).tau;
    const double max_step = opts.max_step > 0.0 ? opts.max_step : tau / 2000.0;
    const double floor = opts.step_floor > 0.0 ? opts.step_floor : tau * 1e-12;
    const double half = cfg.half_width();

    Trajectory traj;
    traj.x0 = x0;
    FlowField field(state, params);

    double t = 0.0;
    double x = x0;
    std::size_t next = 0;
    if (!record_steps) {
        while (next < sample_times.size() && sample_times[next] <= 0.0) {
            traj.t.push_back(sample_times[next]);
            traj.x.push_back(x);
            ++next;
        }
    } else {
        traj.t.push_back(0.0);
        traj.x.push_back(x);
    }
    const auto done = [&] { return record_steps ? !(t < t_end) : next >= sample_times.size(); };
    if (done()) return traj;

    std::array<double, 7> k{};
    if (!field.eval(t, x, k[0])) {
        traj.status = TrajectoryStatus::StepFloorHit;
        return traj;
    }

    double h_try = max_step;
    while (!done()) {
        const double target = record_steps ? t_end : sample_times[next];
        const double remaining = target - t;
        if (remaining < floor) {
            // Rounding leftovers below the floor: snap onto the target.
            t = target;
            traj.t.push_back(t);
            traj.x.push_back(x);
            ++next;
            continue;
        }
        const bool clipped = h_try >= remaining;
        const double h = clipped ? remaining : std::min(h_try, max_step);

        bool stages_ok = true;
        for (int s = 1; s < 7 && stages_ok; ++s) {
            double xs = x;
            for (int j = 0; j < s; ++j) xs += h * kA[s][j] * k[j];
            stages_ok = field.eval(t + kC[s] * h, xs, k[s]);
        }
        double x_new = x;
        double err = 0.0;
        if (stages_ok) {
            for (int j = 0; j < 6; ++j) x_new += h * kA[6][j] * k[j];
            // Stage 7 sits at (t + h, x_new): the FSAL derivative.
            double e = 0.0;
            for (int j = 0; j < 7; ++j) e += kE[j] * k[j];
            const double scale = opts.tol * (1.0 + std::max(std::abs(x), std::abs(x_new)));
            err = std::abs(h * e) / scale;
        }

        if (!stages_ok || !(err <= 1.0)) {
            ++traj.rejected_steps;
            const double shrink = stages_ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
            h_try = h * shrink;
            if (h_try < floor) {
                traj.status = TrajectoryStatus::StepFloorHit;
                return traj;
            }
            continue;
        }

        ++traj.accepted_steps;
        t = clipped ? target : t + h;
        if (x_new > half) x_new = 2.0 * half - x_new;
        if (x_new < -half) x_new = -2.0 * half - x_new;
        x = x_new;
        k[0] = k[6];

        const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        h_try = clipped ? std::max(h_try, h * grow) : h * grow;
        h_try = std::min(h_try, max_step);

        if (record_steps || clipped) {
            traj.t.push_back(t);
            traj.x.push_back(x);
            if (!record_steps) ++next;
        }
    }
    return traj;
}

} // namespace

Trajectory integrate_trajectory(const SpectralState& state, double x0,
                                std::span<const double> sample_times,
                                const DecoherenceParams& params, const IntegratorOptions& opts) {
    return integrate(state, x0, sample_times, 0.0, false, params, opts);
}

Trajectory integrate_trajectory(const SpectralState& state, double x0, double t_end,
                                const DecoherenceParams& params, double tol) {
    if (!(t_end >= 0.0)) throw DomainError("end time must be >= 0");
    IntegratorOptions opts;
    opts.tol = tol;
    return integrate(state, x0, {}, t_end, true, params, opts);
}

std::vector<double> seed_positions(const EnsembleSpec& spec, const InputSignalSpec& signal,
                                   const SpectralState& state) {
    const CavityConfig& cfg = state.cavity();
    signal.validate(cfg);
    const auto lobes = signal.support();
    const double slack = 1e-12 * cfg.L;

    if (spec.seeding == Seeding::Explicit) {
        const auto& seeds = spec.explicit_seeds;
        if (seeds.empty()) throw DomainError("explicit seeding needs at least one seed");
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            check_in_box(seeds[i], cfg);
            if (i > 0 && !(seeds[i] > seeds[i - 1]))
                throw DomainError("explicit seeds must be strictly increasing");
            const bool inside = std::any_of(lobes.begin(), lobes.end(), [&](const auto& lobe) {
                return seeds[i] >= lobe.first - slack && seeds[i] <= lobe.second + slack;
            });
            if (!inside) throw DomainError("explicit seed outside the input signal support");
        }
        return seeds;
    }

    if (spec.count < 1) throw DomainError("ensemble count must be >= 1");
    const auto count = static_cast<std::size_t>(spec.count);
    std::vector<double> seeds;
    seeds.reserve(count);

    if (spec.seeding == Seeding::Uniform) {
        double total = 0.0;
        for (const auto& [a, b] : lobes) total += b - a;
        for (std::size_t j = 0; j < count; ++j) {
            double along = (static_cast<double>(j) + 0.5) * total / static_cast<double>(count);
            for (const auto& [a, b] : lobes) {
                if (along <= b - a) {
                    seeds.push_back(a + along);
                    break;
                }
                along -= b - a;
            }
        }
        return seeds;
    }

    // Quantile seeding on the (truncated) initial density.
    const ModalSeries series(state, DecoherenceParams::coherent());
    const auto t0 = series.slice(0.0);
    constexpr std::size_t kPerLobe = 4001;
    std::vector<double> xs, cdf;
    double acc = 0.0;
    for (const auto& [a, b] : lobes) {
        const auto grid = linspace(a, b, kPerLobe);
        double prev = series.density(grid[0], t0);
        if (xs.empty()) {
            xs.push_back(grid[0]);
            cdf.push_back(0.0);
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double cur = series.density(grid[i], t0);
            acc += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
            xs.push_back(grid[i]);
            cdf.push_back(acc);
            prev = cur;
        }
    }
    if (!(acc > 0.0)) throw DomainError("initial density vanishes on the signal support");
    for (std::size_t j = 0; j < count; ++j) {
        const double target = (static_cast<double>(j) + 0.5) / static_cast<double>(count) * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
        const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, cdf.size() - 1);
        const double span = cdf[i] - cdf[i - 1];
        const double frac = span > 0.0 ? (target - cdf[i - 1]) / span : 0.5;
        double seed = xs[i - 1] + frac * (xs[i] - xs[i - 1]);
        if (!seeds.empty() && !(seed > seeds.back()))
            seed = std::nextafter(seeds.back(), std::numeric_limits<double>::infinity());
        seeds.push_back(seed);
    }
    return seeds;
}

std::vector<Trajectory> integrate_ensemble(const SpectralState& state,
                                           std::span<const double> seeds,
                                           std::span<const double> sample_times,
                                           const DecoherenceParams& params,
                                           const IntegratorOptions& opts) {
    if (seeds.empty()) throw DomainError("ensemble needs at least one seed");
    for (double s : seeds) check_in_box(s, state.cavity());
    std::vector<Trajectory> out(seeds.size());
    const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out[idx] = integrate_trajectory(state, seeds[idx], sample_times, params, opts);
    }
    return out;
}

NoncrossingReport noncrossing_check(std::span<const Trajectory> trajectories) {
    NoncrossingReport report;
    if (trajectories.size() < 2) return report;

    std::size_t longest = 0;
    for (std::size_t i = 1; i < trajectories.size(); ++i)
        if (trajectories[i].t.size() > trajectories[longest].t.size()) longest = i;
    const auto& axis = trajectories[longest].t;
    for (const auto& tr : trajectories) {
        if (tr.x.size() != tr.t.size() || !std::equal(tr.t.begin(), tr.t.end(), axis.begin()))
            throw DomainError("trajectories do not share a common sample grid");
    }

    std::vector<std::size_t> order(trajectories.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trajectories[a].x0 < trajectories[b].x0;
    });

    constexpr double kSlack = 1e-9;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        std::size_t prev = trajectories.size();
        for (std::size_t idx : order) {
            if (k >= trajectories[idx].x.size()) continue;
            if (prev != trajectories.size() &&
                trajectories[idx].x[k] - trajectories[prev].x[k] < -kSlack) {
                report.ok = false;
                report.first_violation = CrossingViolation{k, axis[k], prev, idx};
                return report;
            }
            prev = idx;
        }
    }
    return report;
}

} // namespace qcarpet
