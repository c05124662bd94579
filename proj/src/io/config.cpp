#include "qcarpet/io/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "qcarpet/error.hpp"
#include "qcarpet/io/csv.hpp"

namespace qcarpet::io {

namespace {

constexpr std::array<const char*, 7> kProductNames{"carpet", "trajectories", "densmat", "purity",
                                                   "sweep",  "fit",          "decaymap"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Assignment {
    std::string value;
    int line;
};

class Reader {
public:
    Reader(std::string key, const Assignment& a) : key_(std::move(key)), a_(a) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("line " + std::to_string(a_.line) + ": " + key_ + ": " + why, a_.line, key_);
    }

    double number() const {
        const std::string_view v = trim(a_.value);
        if (v == "auto") return std::numeric_limits<double>::quiet_NaN();
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
            fail("expected a number, got '" + std::string(v) + "'");
        return out;
    }

    int integer() const {
        const std::string_view v = trim(a_.value);
        int out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
            fail("expected an integer, got '" + std::string(v) + "'");
        return out;
    }

    bool boolean() const {
        const std::string_view v = trim(a_.value);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail("expected true or false, got '" + std::string(v) + "'");
    }

    std::string text() const { return std::string(trim(a_.value)); }

    std::vector<double> numbers() const {
        std::vector<double> out;
        const std::string_view v = trim(a_.value);
        if (v.empty()) return out;
        for (auto piece : split(v, ',')) {
            Reader sub(key_, Assignment{std::string(trim(piece)), a_.line});
            out.push_back(sub.number());
        }
        return out;
    }

private:
    std::string key_;
    const Assignment& a_;
};

using Setter = std::function<void(RunConfig&, const Reader&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"cavity.m", [](RunConfig& c, const Reader& r) { c.cavity.m = r.number(); }},
        {"cavity.hbar", [](RunConfig& c, const Reader& r) { c.cavity.hbar = r.number(); }},
        {"cavity.L", [](RunConfig& c, const Reader& r) { c.cavity.L = r.number(); }},
        {"signal.kind",
         [](RunConfig& c, const Reader& r) {
             const auto v = r.text();
             if (v == "single") c.signal.kind = SignalKind::Single;
             else if (v == "double") c.signal.kind = SignalKind::Double;
             else r.fail("expected single or double");
         }},
        {"signal.x0", [](RunConfig& c, const Reader& r) { c.signal.x0 = r.number(); }},
        {"signal.w", [](RunConfig& c, const Reader& r) { c.signal.w = r.number(); }},
        {"basis.N", [](RunConfig& c, const Reader& r) { c.N = r.integer(); }},
        {"basis.renormalize", [](RunConfig& c, const Reader& r) { c.renormalize = r.boolean(); }},
        {"deco.gamma", [](RunConfig& c, const Reader& r) { c.deco.gamma = r.number(); }},
        {"deco.lambda",
         [](RunConfig& c, const Reader& r) {
             const auto v = r.text();
             if (v == "formula") {
                 c.deco.lambda_mode = LambdaMode::Formula;
                 c.deco.lambda = 0.0;
             } else if (v == "off") {
                 c.deco.lambda_mode = LambdaMode::Off;
                 c.deco.lambda = 0.0;
             } else {
                 const double x = r.number();
                 c.deco.lambda_mode = x == 0.0 ? LambdaMode::Off : LambdaMode::Explicit;
                 c.deco.lambda = x == 0.0 ? 0.0 : x;
             }
         }},
        {"grid.nx", [](RunConfig& c, const Reader& r) { c.grid.nx = r.integer(); }},
        {"grid.nt", [](RunConfig& c, const Reader& r) { c.grid.nt = r.integer(); }},
        {"grid.tmax", [](RunConfig& c, const Reader& r) { c.grid.tmax_tau = r.number(); }},
        {"grid.quantity",
         [](RunConfig& c, const Reader& r) {
             const auto v = r.text();
             if (v == "density") c.grid.quantity = CarpetQuantity::Density;
             else if (v == "velocity") c.grid.quantity = CarpetQuantity::Velocity;
             else if (v == "both") c.grid.quantity = CarpetQuantity::Both;
             else r.fail("expected density, velocity or both");
         }},
        {"ensemble.count", [](RunConfig& c, const Reader& r) { c.ensemble.count = r.integer(); }},
        {"ensemble.seeding",
         [](RunConfig& c, const Reader& r) {
             const auto v = r.text();
             if (v == "uniform") c.ensemble.seeding = Seeding::Uniform;
             else if (v == "quantile") c.ensemble.seeding = Seeding::Quantile;
             else if (v == "explicit") c.ensemble.seeding = Seeding::Explicit;
             else r.fail("expected uniform, quantile or explicit");
         }},
        {"ensemble.seeds", [](RunConfig& c, const Reader& r) { c.ensemble.explicit_seeds = r.numbers(); }},
        {"ensemble.tol", [](RunConfig& c, const Reader& r) { c.tol = r.number(); }},
        {"densmat.n", [](RunConfig& c, const Reader& r) { c.densmat.n = r.integer(); }},
        {"densmat.times", [](RunConfig& c, const Reader& r) { c.densmat.times_tau = r.numbers(); }},
        {"purity.tmax", [](RunConfig& c, const Reader& r) { c.purity.tmax_tau = r.number(); }},
        {"purity.samples", [](RunConfig& c, const Reader& r) { c.purity.samples = r.integer(); }},
        {"sweep.x0_min", [](RunConfig& c, const Reader& r) { c.sweep.x0_min = r.number(); }},
        {"sweep.x0_max", [](RunConfig& c, const Reader& r) { c.sweep.x0_max = r.number(); }},
        {"sweep.x0_step", [](RunConfig& c, const Reader& r) { c.sweep.x0_step = r.number(); }},
        {"output.dir", [](RunConfig& c, const Reader& r) { c.outputs.dir = r.text(); }},
        {"output.curve", [](RunConfig& c, const Reader& r) { c.outputs.curve = r.text(); }},
        {"output.products",
         [](RunConfig& c, const Reader& r) {
             c.outputs.products.clear();
             const auto v = r.text();
             if (v.empty()) return;
             for (auto piece : split(v, ',')) {
                 try {
                     c.outputs.products.push_back(product_from_string(trim(piece)));
                 } catch (const ConfigError& e) {
                     r.fail(e.what());
                 }
             }
         }},
    };
    return table;
}

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

const char* to_string(CarpetQuantity q) {
    switch (q) {
    case CarpetQuantity::Density: return "density";
    case CarpetQuantity::Velocity: return "velocity";
    case CarpetQuantity::Both: return "both";
    }
    return "density";
}

std::string join_numbers(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v[i]);
    }
    return out;
}

std::string number_or_auto(double v) { return std::isnan(v) ? "auto" : format_number(v); }

} // namespace

const char* to_string(Product p) noexcept { return kProductNames[static_cast<std::size_t>(p)]; }

Product product_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kProductNames.size(); ++i)
        if (name == kProductNames[i]) return static_cast<Product>(i);
    throw ConfigError("unknown product '" + std::string(name) + "'", 0, "output.products");
}

SweepSpec::SweepSpec()
    : x0_min(std::numeric_limits<double>::quiet_NaN()),
      x0_max(std::numeric_limits<double>::quiet_NaN()) {}

bool operator==(const SweepSpec& a, const SweepSpec& b) {
    return same_number(a.x0_min, b.x0_min) && same_number(a.x0_max, b.x0_max) &&
           same_number(a.x0_step, b.x0_step);
}

RunConfig::RunConfig() {
    deco.gamma = DecoherenceParams::default_gamma();
    deco.lambda_mode = LambdaMode::Formula;
}

void RunConfig::validate() const {
    const auto guard = [](const char* field, const auto& check) {
        try {
            check();
        } catch (const DomainError& e) {
            throw ConfigError(std::string(field) + ": " + e.what(), 0, field);
        }
    };
    const auto require = [](bool ok, const char* field, const char* why) {
        if (!ok) throw ConfigError(std::string(field) + ": " + why, 0, field);
    };

    guard("cavity", [&] { cavity.validate(); });
    guard("signal.x0", [&] { signal.validate(cavity); });
    require(N >= 1, "basis.N", "must be >= 1");
    guard("deco", [&] { deco.validate(); });
    require(grid.nx >= 2, "grid.nx", "must be >= 2");
    require(grid.nt >= 2, "grid.nt", "must be >= 2");
    require(grid.tmax_tau > 0.0 && std::isfinite(grid.tmax_tau), "grid.tmax", "must be > 0");
    require(ensemble.count >= 1, "ensemble.count", "must be >= 1");
    require(ensemble.seeding != Seeding::Explicit || !ensemble.explicit_seeds.empty(), "ensemble.seeds",
            "explicit seeding needs a seed list");
    require(tol > 0.0 && std::isfinite(tol), "ensemble.tol", "must be > 0");
    require(densmat.n >= 2, "densmat.n", "must be >= 2");
    for (double t : densmat.times_tau)
        require(t >= 0.0 && std::isfinite(t), "densmat.times", "times must be >= 0");
    require(purity.tmax_tau > 0.0 && std::isfinite(purity.tmax_tau), "purity.tmax", "must be > 0");
    require(purity.samples >= 2, "purity.samples", "must be >= 2");
    require(sweep.x0_step > 0.0 && std::isfinite(sweep.x0_step), "sweep.x0_step", "must be > 0");
}

RunConfig parse_config(std::string_view text) {
    std::map<std::string, Assignment> assignments;
    std::string section;
    int line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string_view::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name", line_no);
            continue;
        }

        // Several fully qualified assignments may share a line, comma separated.
        auto pieces = split(line, ',');
        const bool multi = pieces.size() > 1 && std::all_of(pieces.begin(), pieces.end(), [](auto p) {
                               const auto eq = p.find('=');
                               return eq != std::string_view::npos &&
                                      trim(p.substr(0, eq)).find('.') != std::string_view::npos;
                           });
        if (!multi) pieces = {line};

        for (auto piece : pieces) {
            const auto eq = piece.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
            const std::string_view key = trim(piece.substr(0, eq));
            if (key.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no);
            std::string full = key.find('.') != std::string_view::npos || section.empty()
                                   ? std::string(key)
                                   : section + "." + std::string(key);
            if (!setters().contains(full))
                throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + full + "'",
                                  line_no, full);
            assignments.insert_or_assign(full, Assignment{std::string(trim(piece.substr(eq + 1))), line_no});
        }
    }

    RunConfig config;
    for (const auto& [key, a] : assignments) setters().at(key)(config, Reader(key, a));

    try {
        config.validate();
    } catch (const ConfigError& e) {
        int line = 0;
        for (const auto& [key, a] : assignments)
            if (key == e.field() || (e.field() == "signal.x0" && key.rfind("signal.", 0) == 0) ||
                (e.field() == "cavity" && key.rfind("cavity.", 0) == 0) ||
                (e.field() == "deco" && key.rfind("deco.", 0) == 0))
                line = std::max(line, a.line);
        if (line > 0)
            throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line, e.field());
        throw;
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    const auto kv = [&os](const char* key, const std::string& value) {
        os << key << " = " << value << '\n';
    };
    const auto lambda_text = [&] {
        switch (c.deco.lambda_mode) {
        case LambdaMode::Off: return std::string("0");
        case LambdaMode::Formula: return std::string("formula");
        case LambdaMode::Explicit: return format_number(c.deco.lambda);
        }
        return std::string("0");
    };

    os << "[cavity]\n";
    kv("m", format_number(c.cavity.m));
    kv("hbar", format_number(c.cavity.hbar));
    kv("L", format_number(c.cavity.L));
    os << "\n[signal]\n";
    kv("kind", to_string(c.signal.kind));
    kv("x0", format_number(c.signal.x0));
    kv("w", format_number(c.signal.w));
    os << "\n[basis]\n";
    kv("N", std::to_string(c.N));
    kv("renormalize", c.renormalize ? "true" : "false");
    os << "\n[deco]\n";
    kv("gamma", format_number(c.deco.gamma));
    kv("lambda", lambda_text());
    os << "\n[grid]\n";
    kv("nx", std::to_string(c.grid.nx));
    kv("nt", std::to_string(c.grid.nt));
    kv("tmax", format_number(c.grid.tmax_tau));
    kv("quantity", to_string(c.grid.quantity));
    os << "\n[ensemble]\n";
    kv("count", std::to_string(c.ensemble.count));
    kv("seeding", qcarpet::to_string(c.ensemble.seeding));
    kv("seeds", join_numbers(c.ensemble.explicit_seeds));
    kv("tol", format_number(c.tol));
    os << "\n[densmat]\n";
    kv("n", std::to_string(c.densmat.n));
    kv("times", join_numbers(c.densmat.times_tau));
    os << "\n[purity]\n";
    kv("tmax", format_number(c.purity.tmax_tau));
    kv("samples", std::to_string(c.purity.samples));
    os << "\n[sweep]\n";
    kv("x0_min", number_or_auto(c.sweep.x0_min));
    kv("x0_max", number_or_auto(c.sweep.x0_max));
    kv("x0_step", format_number(c.sweep.x0_step));
    os << "\n[output]\n";
    kv("dir", c.outputs.dir.string());
    std::string products;
    for (std::size_t i = 0; i < c.outputs.products.size(); ++i) {
        if (i) products += ", ";
        products += to_string(c.outputs.products[i]);
    }
    kv("products", products);
    kv("curve", c.outputs.curve.string());
    return os.str();
}

std::vector<double> sweep_values(const RunConfig& config) {
    const double half = config.cavity.half_width();
    const double hw = 0.5 * config.signal.w;
    const bool single = config.signal.kind == SignalKind::Single;
    const double lo = std::isnan(config.sweep.x0_min) ? (single ? 0.0 : hw) : config.sweep.x0_min;
    const double hi = std::isnan(config.sweep.x0_max) ? half - hw : config.sweep.x0_max;
    return sweep_range(lo, hi, config.sweep.x0_step);
}

} // namespace qcarpet::io
