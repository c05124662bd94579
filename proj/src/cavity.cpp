#include "qcarpet/cavity.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "qcarpet/error.hpp"

namespace qcarpet {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative slack admitted on geometric invariants (box edges, lobe overlap).
constexpr double kGeomSlack = 1e-12;

bool resonant(int alpha, double w, double L) {
    return std::abs(alpha * w - L) < 1e-9 * L;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

NodeProximity::NodeProximity(double x, double t, double density)
    : std::runtime_error("density " + fmt_num(density) + " below floor at x=" + fmt_num(x) +
                         ", t=" + fmt_num(t)),
      x_(x), t_(t), density_(density) {}

void CavityConfig::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("cavity.m must be positive");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("cavity.hbar must be positive");
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("cavity.L must be positive");
}

void check_in_box(double x, const CavityConfig& cfg) {
    if (!(std::abs(x) <= cfg.half_width() * (1.0 + kGeomSlack)))
        throw DomainError("position " + fmt_num(x) + " outside the box [-L/2, L/2]");
}

const char* to_string(Parity p) noexcept {
    return p == Parity::Even ? "even" : "odd";
}

Mode Mode::make(int alpha, const CavityConfig& cfg) {
    if (alpha < 1) throw DomainError("mode index must be >= 1");
    Mode mode;
    mode.alpha = alpha;
    mode.parity = parity_of(alpha);
    mode.k = alpha * kPi / cfg.L;
    mode.energy = eigenenergy(alpha, cfg);
    return mode;
}

double eigenenergy(int alpha, const CavityConfig& cfg) {
    if (alpha < 1) throw DomainError("mode index must be >= 1");
    const double k = alpha * kPi / cfg.L;
    return cfg.hbar * cfg.hbar * k * k / (2.0 * cfg.m);
}

double eigenmode(const Mode& mode, double x, const CavityConfig& cfg) {
    check_in_box(x, cfg);
    const double norm = std::sqrt(2.0 / cfg.L);
    return mode.parity == Parity::Even ? norm * std::cos(mode.k * x) : norm * std::sin(mode.k * x);
}

double eigenmode(int alpha, double x, const CavityConfig& cfg) {
    return eigenmode(Mode::make(alpha, cfg), x, cfg);
}

double eigenmode_derivative(int alpha, double x, const CavityConfig& cfg) {
    const Mode mode = Mode::make(alpha, cfg);
    check_in_box(x, cfg);
    const double norm = std::sqrt(2.0 / cfg.L);
    return mode.parity == Parity::Even ? -norm * mode.k * std::sin(mode.k * x)
                                       : norm * mode.k * std::cos(mode.k * x);
}

const char* to_string(SignalKind k) noexcept {
    return k == SignalKind::Single ? "single" : "double";
}

void InputSignalSpec::validate(const CavityConfig& cfg) const {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("signal.w must be positive");
    if (!std::isfinite(x0)) throw DomainError("signal.x0 must be finite");
    const double half = cfg.half_width();
    const double slack = kGeomSlack * cfg.L;
    if (kind == SignalKind::Single) {
        if (std::abs(x0) + 0.5 * w > half + slack)
            throw DomainError("signal.x0 = " + fmt_num(x0) +
                              ": single lobe truncated by the box (need |x0| + w/2 <= L/2)");
    } else {
        if (0.5 * w > x0 + slack)
            throw DomainError("signal.x0 = " + fmt_num(x0) +
                              ": double lobes overlap (need x0 >= w/2)");
        if (x0 + 0.5 * w > half + slack)
            throw DomainError("signal.x0 = " + fmt_num(x0) +
                              ": double lobes truncated by the box (need x0 + w/2 <= L/2)");
    }
}

double InputSignalSpec::k0() const noexcept { return kPi / w; }

double InputSignalSpec::amplitude(double x) const noexcept {
    const auto lobe = [this, x](double centre, double scale) {
        const double d = x - centre;
        return std::abs(d) <= 0.5 * w ? scale * std::cos(kPi * d / w) : 0.0;
    };
    if (kind == SignalKind::Single) return lobe(x0, std::sqrt(2.0 / w));
    const double scale = std::sqrt(1.0 / w);
    return lobe(-x0, scale) + lobe(x0, scale);
}

std::vector<std::pair<double, double>> InputSignalSpec::support() const {
    const double hw = 0.5 * w;
    if (kind == SignalKind::Single) return {{x0 - hw, x0 + hw}};
    return {{-x0 - hw, -x0 + hw}, {x0 - hw, x0 + hw}};
}

SpectralState::SpectralState(CavityConfig cfg, std::vector<double> coeffs)
    : cfg_(cfg), coeffs_(std::move(coeffs)) {
    cfg_.validate();
    if (coeffs_.empty()) throw DomainError("spectral state needs at least one mode");
    for (double c : coeffs_)
        if (!std::isfinite(c)) throw DomainError("spectral coefficients must be finite");
}

double SpectralState::coeff(int alpha) const {
    if (alpha < 1 || alpha > size()) throw DomainError("mode index outside the retained basis");
    return coeffs_[static_cast<std::size_t>(alpha - 1)];
}

double SpectralState::norm() const noexcept {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return s;
}

SpectralState SpectralState::renormalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw DomainError("cannot renormalize a zero state");
    const double scale = 1.0 / std::sqrt(n);
    std::vector<double> out(coeffs_);
    for (double& c : out) c *= scale;
    return SpectralState(cfg_, std::move(out));
}

SpectralState decompose_single(const InputSignalSpec& spec, const CavityConfig& cfg, int N) {
    cfg.validate();
    if (spec.kind != SignalKind::Single) throw DomainError("decompose_single needs a single signal");
    spec.validate(cfg);
    if (N < 1) throw DomainError("truncation N must be >= 1");

    const double L = cfg.L, w = spec.w, x0 = spec.x0;
    const double k0 = spec.k0();
    const double pref = 4.0 / std::sqrt(w * L);
    std::vector<double> c(static_cast<std::size_t>(N));
    for (int alpha = 1; alpha <= N; ++alpha) {
        const bool even = parity_of(alpha) == Parity::Even;
        const double k = alpha * kPi / L;
        double value;
        if (resonant(alpha, w, L)) {
            value = std::sqrt(w / L) * (even ? std::cos(k0 * x0) : std::sin(k0 * x0));
        } else {
            const double shape = even ? std::cos(k * x0) : std::sin(k * x0);
            value = pref * (k0 / (k0 * k0 - k * k)) * shape * std::cos(0.5 * k * w);
        }
        c[static_cast<std::size_t>(alpha - 1)] = value;
    }
    return SpectralState(cfg, std::move(c));
}

SpectralState decompose_double(const InputSignalSpec& spec, const CavityConfig& cfg, int N) {
    cfg.validate();
    if (spec.kind != SignalKind::Double) throw DomainError("decompose_double needs a double signal");
    spec.validate(cfg);
    if (N < 1) throw DomainError("truncation N must be >= 1");

    const double L = cfg.L, w = spec.w, x0 = spec.x0;
    const double k0 = spec.k0();
    const double pref = 4.0 * std::sqrt(2.0 / (w * L));
    std::vector<double> c(static_cast<std::size_t>(N), 0.0);
    for (int alpha = 1; alpha <= N; alpha += 2) {
        const double k = alpha * kPi / L;
        double value;
        if (resonant(alpha, w, L))
            value = std::sqrt(2.0 * w / L) * std::cos(k0 * x0);
        else
            value = pref * (k0 / (k0 * k0 - k * k)) * std::cos(k * x0) * std::cos(0.5 * k * w);
        c[static_cast<std::size_t>(alpha - 1)] = value;
    }
    return SpectralState(cfg, std::move(c));
}

SpectralState decompose(const InputSignalSpec& spec, const CavityConfig& cfg, int N) {
    return spec.kind == SignalKind::Single ? decompose_single(spec, cfg, N)
                                           : decompose_double(spec, cfg, N);
}

SpectralState decompose_numeric(std::span<const double> samples, const CavityConfig& cfg, int N) {
    cfg.validate();
    if (samples.size() < 3) throw DomainError("numeric decomposition needs >= 3 samples");
    if (N < 1) throw DomainError("truncation N must be >= 1");

    const std::size_t n = samples.size();
    const double h = cfg.L / static_cast<double>(n - 1);
    const double norm = std::sqrt(2.0 / cfg.L);
    std::vector<double> integrand(n);
    std::vector<double> c(static_cast<std::size_t>(N));
    for (int alpha = 1; alpha <= N; ++alpha) {
        const double k = alpha * kPi / cfg.L;
        const bool even = parity_of(alpha) == Parity::Even;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = -cfg.half_width() + static_cast<double>(i) * h;
            const double phi = even ? std::cos(k * x) : std::sin(k * x);
            integrand[i] = norm * phi * samples[i];
        }
        c[static_cast<std::size_t>(alpha - 1)] = simpson(integrand, h);
    }
    return SpectralState(cfg, std::move(c));
}

double norm_deficit(const SpectralState& state) { return 1.0 - state.norm(); }

double simpson(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (y[0] + y[1]);

    const auto simpson_odd = [h](std::span<const double> v) {
        // v.size() odd, >= 3
        double odd = 0.0, even = 0.0;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) (i % 2 ? odd : even) += v[i];
        return h / 3.0 * (v.front() + v.back() + 4.0 * odd + 2.0 * even);
    };

    if (n % 2 == 1) return simpson_odd(y);

    // Even count: Simpson on the head, 3/8 rule on the last three intervals.
    const auto tail = y.subspan(n - 4);
    const double three_eighths = 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
    if (n == 4) return three_eighths;
    return simpson_odd(y.first(n - 3)) + three_eighths;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 0) return out;
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + static_cast<double>(i) * step;
    out.back() = b;
    return out;
}

} // namespace qcarpet
