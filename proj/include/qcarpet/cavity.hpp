#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qcarpet {

/// Physical constants of the infinite square well centred at x = 0.
struct CavityConfig {
    double m = 1.0;
    double hbar = 1.0;
    double L = 50.0;

    void validate() const;
    double half_width() const noexcept { return 0.5 * L; }

    friend bool operator==(const CavityConfig&, const CavityConfig&) = default;
};

/// Throws DomainError unless |x| <= L/2 (with a few ulps of slack so that
/// grids built from the endpoints are accepted).
void check_in_box(double x, const CavityConfig& cfg);

enum class Parity { Even, Odd };

const char* to_string(Parity p) noexcept;

/// Box eigenmode. Odd alpha carries even parity (cosine), even alpha odd
/// parity (sine).
struct Mode {
    int alpha = 1;
    Parity parity = Parity::Even;
    double k = 0.0;
    double energy = 0.0;

    static Mode make(int alpha, const CavityConfig& cfg);
};

inline Parity parity_of(int alpha) noexcept {
    return (alpha % 2 == 1) ? Parity::Even : Parity::Odd;
}

double eigenenergy(int alpha, const CavityConfig& cfg);
double eigenmode(const Mode& mode, double x, const CavityConfig& cfg);
double eigenmode(int alpha, double x, const CavityConfig& cfg);
double eigenmode_derivative(int alpha, double x, const CavityConfig& cfg);

enum class SignalKind { Single, Double };

const char* to_string(SignalKind k) noexcept;

/// Half-cosine input amplitude: a single lobe centred at x0, or the even
/// superposition of lobes at +x0 and -x0.
struct InputSignalSpec {
    SignalKind kind = SignalKind::Single;
    double x0 = 0.0;
    double w = 10.0;

    void validate(const CavityConfig& cfg) const;

    /// psi_0(x); zero outside the lobes.
    double amplitude(double x) const noexcept;

    /// Lobe intervals in increasing order (one for single, two for double).
    std::vector<std::pair<double, double>> support() const;

    double k0() const noexcept;

    friend bool operator==(const InputSignalSpec&, const InputSignalSpec&) = default;
};

/// Real spectral coefficients c_alpha for alpha = 1..N. Signs carry the
/// {0, pi} phases.
class SpectralState {
public:
    SpectralState(CavityConfig cfg, std::vector<double> coeffs);

    const CavityConfig& cavity() const noexcept { return cfg_; }
    int size() const noexcept { return static_cast<int>(coeffs_.size()); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double coeff(int alpha) const;

    /// Sum of |c_alpha|^2 over the retained modes.
    /// sum c_alpha^2 (captured probability, not its square root).
    double norm() const noexcept;

    /// Copy rescaled to unit norm. Throws DomainError on a zero state.
    SpectralState renormalized() const;

private:
    CavityConfig cfg_;
    std::vector<double> coeffs_;
};

SpectralState decompose_single(const InputSignalSpec& spec, const CavityConfig& cfg, int N);
SpectralState decompose_double(const InputSignalSpec& spec, const CavityConfig& cfg, int N);
SpectralState decompose(const InputSignalSpec& spec, const CavityConfig& cfg, int N);

/// Projection of a sampled signal onto the first N modes by composite
/// Simpson quadrature. `samples` are psi_0 on a uniform grid spanning
/// [-L/2, L/2] endpoints included.
SpectralState decompose_numeric(std::span<const double> samples, const CavityConfig& cfg, int N);

/// 1 - sum |c_alpha|^2.
double norm_deficit(const SpectralState& state);

/// Composite Simpson rule for uniformly spaced samples. An even sample
/// count closes the last three intervals with the 3/8 rule.
double simpson(std::span<const double> y, double h);

/// n uniformly spaced points over [a, b], endpoints included.
std::vector<double> linspace(double a, double b, std::size_t n);

} // namespace qcarpet
