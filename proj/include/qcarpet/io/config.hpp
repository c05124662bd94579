#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcarpet/bohmian.hpp"
#include "qcarpet/cavity.hpp"
#include "qcarpet/decoherence.hpp"
#include "qcarpet/energy.hpp"

namespace qcarpet::io {

enum class Product { Carpet, Trajectories, Densmat, Purity, Sweep, Fit, Decaymap };

const char* to_string(Product p) noexcept;
Product product_from_string(std::string_view name);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : std::runtime_error(what), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

enum class CarpetQuantity { Density, Velocity, Both };

struct GridSpec {
    int nx = 1001;
    int nt = 1001;
    double tmax_tau = 8.0;  ///< carpet and trajectory horizon in units of tau
    CarpetQuantity quantity = CarpetQuantity::Density;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct DensmatSpec {
    int n = 201;
    std::vector<double> times_tau{0.0, 0.5, 1.0, 20.0};

    friend bool operator==(const DensmatSpec&, const DensmatSpec&) = default;
};

struct PuritySpec {
    double tmax_tau = 10.0;
    int samples = 1001;

    friend bool operator==(const PuritySpec&, const PuritySpec&) = default;
};

/// Unset bounds (NaN) take the largest range the signal invariants allow.
struct SweepSpec {
    double x0_min;
    double x0_max;
    double x0_step = 0.5;

    SweepSpec();
    friend bool operator==(const SweepSpec& a, const SweepSpec& b);
};

struct OutputSpec {
    std::filesystem::path dir = "out";
    std::vector<Product> products;
    std::filesystem::path curve;  ///< optional external purity curve for `fit`

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
    CavityConfig cavity;
    InputSignalSpec signal;
    int N = 50;
    bool renormalize = false;
    DecoherenceParams deco;
    GridSpec grid;
    EnsembleSpec ensemble;
    double tol = 1e-8;
    DensmatSpec densmat;
    PuritySpec purity;
    SweepSpec sweep;
    OutputSpec outputs;

    RunConfig();

    /// Throws ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Line-oriented `key = value` text with optional `[section]` headers;
/// keys may also be written fully qualified (`signal.x0 = 3`). `#` and `;`
/// start comments. Unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Resolved sweep bounds for the configured signal kind.
std::vector<double> sweep_values(const RunConfig& config);

} // namespace qcarpet::io
