#include "qcarpet/io/run.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "qcarpet/bohmian.hpp"
#include "qcarpet/energy.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/io/csv.hpp"
#include "qcarpet/io/image.hpp"
#include "qcarpet/kernels.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet::io {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

namespace {

class Writer {
public:
    Writer(const RunConfig& config, Manifest& manifest) : config_(config), manifest_(manifest) {}

    void file(const std::string& product, const std::string& name, const std::string& bytes) {
        const auto path = config_.outputs.dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) throw std::runtime_error("failed writing " + path.string());
        manifest_.files.push_back({product, name, bytes.size(), sha256_hex(bytes)});
    }

    // CSV with the run configuration echoed as a comment header.
    void csv(const std::string& product, const std::string& name,
             const std::function<void(std::ostream&)>& body) {
        std::ostringstream os;
        write_comment_block(os, "product = " + product + "\n" + serialize_config(config_));
        body(os);
        file(product, name, os.str());
    }

private:
    const RunConfig& config_;
    Manifest& manifest_;
};

SpectralState initial_state(const RunConfig& c) {
    SpectralState state = decompose(c.signal, c.cavity, c.N);
    return c.renormalize ? state.renormalized() : state;
}

double abs_percentile(std::span<const double> v, double q) {
    std::vector<double> a;
    a.reserve(v.size());
    for (double x : v) a.push_back(std::abs(x));
    if (a.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(a.size() - 1)));
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end());
    return a[k];
}

void carpet_product(const RunConfig& c, Writer& w) {
    const SpectralState state = initial_state(c);
    const double tau = revival_times(c.cavity).tau;
    const auto grid = SpaceTimeGrid::uniform(c.cavity, static_cast<std::size_t>(c.grid.nx),
                                             static_cast<std::size_t>(c.grid.nt), c.grid.tmax_tau * tau);
    if (c.grid.quantity != CarpetQuantity::Velocity) {
        const CarpetGrid g = carpet(state, grid, Quantity::Density, c.deco);
        w.csv("carpet", "carpet_density.csv", [&](std::ostream& os) { write_carpet(os, g); });
        const double top = *std::max_element(g.values.begin(), g.values.end());
        w.file("carpet", "carpet_density.ppm",
               render_heatmap(g.values, g.rows(), g.cols(), ColorMap::sequential(0.0, top)));
    }
    if (c.grid.quantity != CarpetQuantity::Density) {
        const CarpetGrid g = carpet(state, grid, Quantity::Velocity, c.deco);
        w.csv("carpet", "carpet_velocity.csv", [&](std::ostream& os) { write_carpet(os, g); });
        // Velocities spike near nodes; anchor the map at the 99th percentile.
        double anchor = abs_percentile(g.values, 0.99);
        if (!(anchor > 0.0)) anchor = 1.0;
        w.file("carpet", "carpet_velocity.ppm",
               render_heatmap(g.values, g.rows(), g.cols(), ColorMap::diverging(anchor)));
    }
}

void trajectories_product(const RunConfig& c, Writer& w, Manifest& manifest) {
    const SpectralState state = initial_state(c);
    const double tau = revival_times(c.cavity).tau;
    const auto seeds = seed_positions(c.ensemble, c.signal, state);
    const auto times = linspace(0.0, c.grid.tmax_tau * tau, static_cast<std::size_t>(c.grid.nt));
    IntegratorOptions opts;
    opts.tol = c.tol;
    const auto ensemble = integrate_ensemble(state, seeds, times, c.deco, opts);
    const auto report = noncrossing_check(ensemble);

    w.csv("trajectories", "trajectories.csv", [&](std::ostream& os) { write_trajectories(os, ensemble); });
    w.csv("trajectories", "trajectories_status.csv", [&](std::ostream& os) {
        os << "# noncrossing=" << (report.ok ? "ok" : "violated");
        if (report.first_violation)
            os << " first_violation_t=" << format_number(report.first_violation->time) << " pair="
               << (report.first_violation->lower + 1) << ',' << (report.first_violation->upper + 1);
        os << '\n';
        write_trajectory_status(os, ensemble);
    });
    if (!report.ok)
        manifest.failures.push_back({"trajectories", "noncrossing check failed"});
}

void densmat_product(const RunConfig& c, Writer& w) {
    const SpectralState state = initial_state(c);
    const double tau = revival_times(c.cavity).tau;
    const auto axis = linspace(-c.cavity.half_width(), c.cavity.half_width(), static_cast<std::size_t>(c.densmat.n));
    for (std::size_t k = 0; k < c.densmat.times_tau.size(); ++k) {
        const double t = c.densmat.times_tau[k] * tau;
        const auto g = density_matrix_grid(state, axis, axis, t, c.deco);
        const std::string stem = "densmat_" + std::to_string(k);
        w.csv("densmat", stem + "_real.csv", [&](std::ostream& os) { write_density_matrix(os, g, ComplexPart::Real); });
        w.csv("densmat", stem + "_imag.csv", [&](std::ostream& os) { write_density_matrix(os, g, ComplexPart::Imag); });
        std::vector<double> re(g.values.size());
        std::transform(g.values.begin(), g.values.end(), re.begin(), [](auto z) { return z.real(); });
        double anchor = 0.0;
        for (double v : re) anchor = std::max(anchor, std::abs(v));
        if (!(anchor > 0.0)) anchor = 1.0;
        w.file("densmat", stem + "_real.ppm", render_heatmap(re, axis.size(), axis.size(), ColorMap::diverging(anchor)));
    }
}

PurityCurve configured_curve(const RunConfig& c, const SpectralState& state) {
    const double tau = revival_times(c.cavity).tau;
    const auto times = linspace(0.0, c.purity.tmax_tau * tau, static_cast<std::size_t>(c.purity.samples));
    DecoherenceParams p;
    p.gamma = c.deco.gamma;
    return purity_curve(state, times, p);
}

void purity_product(const RunConfig& c, Writer& w) {
    const SpectralState state = initial_state(c);
    const auto curve = configured_curve(c, state);
    const auto corr = correlation_matrix(state);
    w.csv("purity", "coefficients.csv", [&](std::ostream& os) { write_spectral_state(os, state, c.signal); });
    w.csv("purity", "purity.csv", [&](std::ostream& os) {
        os << "# chi_inf=" << format_number(purity_asymptote(state))
           << " norm_deficit=" << format_number(norm_deficit(state)) << '\n';
        write_purity_curve(os, curve);
    });
    w.csv("purity", "correlation.csv", [&](std::ostream& os) { write_correlation_matrix(os, corr); });
    double anchor = 0.0;
    for (double v : corr.values) anchor = std::max(anchor, std::abs(v));
    if (!(anchor > 0.0)) anchor = 1.0;
    w.file("purity", "correlation.ppm",
           render_heatmap(corr.values, static_cast<std::size_t>(corr.n), static_cast<std::size_t>(corr.n),
                          ColorMap::diverging(anchor)));
}

void fit_product(const RunConfig& c, Writer& w) {
    PurityCurve curve;
    if (!c.outputs.curve.empty()) {
        std::ifstream in(c.outputs.curve);
        if (!in) throw std::runtime_error("cannot read purity curve " + c.outputs.curve.string());
        curve = read_purity_curve(in);
    } else {
        curve = configured_curve(c, initial_state(c));
    }
    const double tau = revival_times(c.cavity).tau;
    try {
        const PurityFit fit = fit_purity(curve, tau);
        w.csv("fit", "fit.csv", [&](std::ostream& os) { write_purity_fit(os, fit); });
        w.csv("fit", "fit_curve.csv", [&](std::ostream& os) { write_purity_curve(os, curve, &fit); });
    } catch (const FitFailure& e) {
        if (e.best())
            w.csv("fit", "fit_best_candidate.csv", [&](std::ostream& os) { write_purity_fit(os, *e.best()); });
        throw;
    }
}

void sweep_product(const RunConfig& c, Writer& w) {
    const auto x0s = sweep_values(c);
    SweepOptions opts;
    opts.span_tau = c.purity.tmax_tau;
    opts.samples = static_cast<std::size_t>(c.purity.samples);
    opts.renormalize = c.renormalize;
    const auto rows = sweep_x0(c.signal.kind, x0s, c.signal.w, c.cavity, c.N, c.deco.gamma, opts);
    w.csv("sweep", "sweep.csv", [&](std::ostream& os) { write_sweep(os, rows); });
}

void decaymap_product(const RunConfig& c, Writer& w) {
    const auto m = decay_time_map(c.cavity, c.deco.gamma, c.N);
    w.csv("decaymap", "decay_map.csv", [&](std::ostream& os) { write_decay_map(os, m); });
    // Image on log10 scale; the infinite diagonal is painted at the top anchor.
    std::vector<double> logs(m.values.size());
    double top = -std::numeric_limits<double>::infinity(), bottom = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        if (std::isinf(m.values[i])) continue;
        logs[i] = std::log10(m.values[i]);
        top = std::max(top, logs[i]);
        bottom = std::min(bottom, logs[i]);
    }
    if (!std::isfinite(top)) top = bottom = 0.0;
    for (std::size_t i = 0; i < m.values.size(); ++i)
        if (std::isinf(m.values[i])) logs[i] = top;
    w.file("decaymap", "decay_map.ppm",
           render_heatmap(logs, static_cast<std::size_t>(m.n), static_cast<std::size_t>(m.n),
                          ColorMap::sequential(bottom, top)));
}

} // namespace

Manifest run(const RunConfig& config, int parallelism) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(config.outputs.dir, ec);
    if (ec || !std::filesystem::is_directory(config.outputs.dir))
        throw ConfigError("output.dir: cannot create " + config.outputs.dir.string(), 0, "output.dir");
    {
        const auto probe = config.outputs.dir / ".qcarpet_write_probe";
        std::ofstream out(probe);
        if (!out) throw ConfigError("output.dir: " + config.outputs.dir.string() + " is not writable", 0, "output.dir");
        out.close();
        std::filesystem::remove(probe, ec);
    }

    const ThreadCountScope threads(parallelism);
    Manifest manifest;
    Writer writer(config, manifest);
    for (const Product p : config.outputs.products) {
        try {
            switch (p) {
            case Product::Carpet: carpet_product(config, writer); break;
            case Product::Trajectories: trajectories_product(config, writer, manifest); break;
            case Product::Densmat: densmat_product(config, writer); break;
            case Product::Purity: purity_product(config, writer); break;
            case Product::Sweep: sweep_product(config, writer); break;
            case Product::Fit: fit_product(config, writer); break;
            case Product::Decaymap: decaymap_product(config, writer); break;
            }
        } catch (const std::exception& e) {
            manifest.failures.push_back({to_string(p), e.what()});
        }
    }

    std::ostringstream os;
    os << "product,path,bytes,sha256\n";
    for (const auto& f : manifest.files)
        os << f.product << ',' << f.path.string() << ',' << f.bytes << ',' << f.sha256 << '\n';
    for (const auto& f : manifest.failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        os << "# failure " << f.product << ": " << msg << '\n';
    }
    std::ofstream out(config.outputs.dir / "manifest.csv", std::ios::binary | std::ios::trunc);
    out << os.str();
    return manifest;
}

} // namespace qcarpet::io
