// qcarpet: quantum carpets in a 1-D box, their decoherence-driven erasure,
// Bohmian flow and purity analyses.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qcarpet/error.hpp"
#include "qcarpet/io/config.hpp"
#include "qcarpet/io/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProductFailure = 1;
constexpr int kExitConfigError = 2;

struct Overrides {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::optional<int> seed_count;
    std::optional<double> gamma;
    std::optional<std::string> lambda;
    std::optional<double> x0;
    std::optional<std::string> kind;
    std::optional<double> tmax;
    std::optional<std::string> curve;
    bool renormalize = false;
};

// Applies command-line overrides as config text so they share the parser's
// validation and error messages.
std::string override_text(const Overrides& o) {
    std::string s;
    const auto add = [&s](const std::string& key, const std::string& value) { s += key + " = " + value + "\n"; };
    if (!o.out_dir.empty()) add("output.dir", o.out_dir);
    if (o.seed_count) add("ensemble.count", std::to_string(*o.seed_count));
    if (o.gamma) add("deco.gamma", CLI::detail::to_string(*o.gamma));
    if (o.lambda) add("deco.lambda", *o.lambda);
    if (o.x0) add("signal.x0", CLI::detail::to_string(*o.x0));
    if (o.kind) add("signal.kind", *o.kind);
    if (o.tmax) {
        add("grid.tmax", CLI::detail::to_string(*o.tmax));
        add("purity.tmax", CLI::detail::to_string(*o.tmax));
    }
    if (o.curve) add("output.curve", *o.curve);
    if (o.renormalize) add("basis.renormalize", "true");
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum carpets, decoherence and Bohmian flow in a 1-D box"};
    app.fallthrough();
    app.require_subcommand(1);

    Overrides o;
    app.add_option("--config", o.config_path, "Run configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out_dir, "Output directory");
    app.add_option("--jobs", o.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed-count", o.seed_count, "Number of Bohmian trajectories");
    app.add_option("--gamma", o.gamma, "Energy damping control gamma");
    app.add_option("--lambda", o.lambda, "Localization rate: 0, formula or a value");
    app.add_option("--x0", o.x0, "Signal centre");
    app.add_option("--kind", o.kind, "Signal kind")->check(CLI::IsMember({"single", "double"}));
    app.add_option("--tmax", o.tmax, "Time horizon in units of tau");
    app.add_option("--curve", o.curve, "External purity curve CSV for `fit`");
    app.add_flag("--renormalize", o.renormalize, "Renormalize the truncated state");

    const std::pair<const char*, const char*> commands[] = {
        {"carpet", "Density (and/or velocity) carpet CSV and image"},
        {"trajectories", "Bohmian trajectory ensemble"},
        {"densmat", "Density-matrix snapshots"},
        {"purity", "Purity curve, coefficients and correlation matrix"},
        {"sweep", "Asymptotic purity and fitted timescales versus x0"},
        {"fit", "Three-exponential fit of a purity curve"},
        {"decaymap", "Pair decay-time map"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    const std::string product = app.get_subcommands().front()->get_name();
    qcarpet::io::RunConfig config;
    try {
        std::string text;
        if (!o.config_path.empty()) {
            std::ifstream in(o.config_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        text += "\n" + override_text(o);
        config = qcarpet::io::parse_config(text);
        config.outputs.products = {qcarpet::io::product_from_string(product)};
    } catch (const qcarpet::io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        const auto manifest = qcarpet::io::run(config, o.jobs);
        for (const auto& f : manifest.files)
            std::cout << (config.outputs.dir / f.path).string() << "  " << f.sha256 << '\n';
        for (const auto& f : manifest.failures) std::cerr << f.product << " failed: " << f.message << '\n';
        return manifest.ok() ? kExitOk : kExitProductFailure;
    } catch (const qcarpet::io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProductFailure;
    }
}
