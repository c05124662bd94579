#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qcarpet/error.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/io/config.hpp"
#include "qcarpet/io/csv.hpp"
#include "qcarpet/io/image.hpp"
#include "qcarpet/io/run.hpp"

using namespace qcarpet;
using namespace qcarpet::io;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("qcarpet_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}
} // namespace

TEST_CASE("empty config gives the defaults") {
    const auto c = parse_config("");
    CHECK(c.cavity == CavityConfig{});
    CHECK(c.signal.w == 10.0);
    CHECK(c.signal.x0 == 0.0);
    CHECK(c.N == 50);
    CHECK(c.deco.gamma == DecoherenceParams::default_gamma());
    CHECK(c.deco.lambda_mode == LambdaMode::Formula);
    CHECK(c == RunConfig{});
}

TEST_CASE("config sections, dotted keys and comments") {
    const auto c = parse_config(
        "# comment\n"
        "[signal]\n"
        "kind = double   ; trailing\n"
        "x0 = 15\n"
        "\n"
        "basis.N = 80\n"
        "[deco]\n"
        "gamma = 0\n"
        "lambda = 0\n"
        "[output]\n"
        "products = carpet, fit\n");
    CHECK(c.signal.kind == SignalKind::Double);
    CHECK(c.signal.x0 == 15.0);
    CHECK(c.N == 80);
    CHECK(c.deco.is_coherent());
    CHECK(c.outputs.products == std::vector<Product>{Product::Carpet, Product::Fit});
}

TEST_CASE("config errors carry line numbers and fields") {
    try {
        parse_config("signal.kind = double, signal.x0 = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "signal.x0");
        CHECK(e.line() == 1);
    }
    try {
        parse_config("\n\nsignal.colour = red\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_config("[signal\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("basis.N = fifty\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("cavity.L = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("deco.gamma = -0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
}

TEST_CASE("property: config round trip") {
    RunConfig c;
    c.signal = {SignalKind::Double, 18.0, 8.0};
    c.cavity.L = 60.0;
    c.N = 120;
    c.renormalize = true;
    c.deco = {0.3, LambdaMode::Explicit, 1.5e-4};
    c.grid.nx = 301;
    c.grid.quantity = CarpetQuantity::Both;
    c.ensemble = {3, Seeding::Explicit, {10.5, 12.0, 14.25}};
    c.tol = 1e-9;
    c.densmat.times_tau = {0.0, 2.5};
    c.sweep.x0_min = 5.0;
    c.sweep.x0_step = 0.25;
    c.outputs.products = {Product::Sweep, Product::Decaymap};
    c.outputs.dir = "results/run 1";
    CHECK(parse_config(serialize_config(c)) == c);
    CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
    // Values that need all 17 digits survive.
    RunConfig d;
    d.signal.x0 = 0.1 + 0.2;
    CHECK(parse_config(serialize_config(d)).signal.x0 == d.signal.x0);
}

TEST_CASE("sweep values follow the signal kind") {
    auto c = parse_config("sweep.x0_step = 0.5\n");
    const auto single = sweep_values(c);
    CHECK(single.size() == 41);
    CHECK(single.front() == 0.0);
    CHECK(single.back() == 20.0);
    c = parse_config("signal.kind = double\nsignal.x0 = 10\n");
    const auto twin = sweep_values(c);
    CHECK(twin.front() == 5.0);
    CHECK(twin.back() == 20.0);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("csv writers") {
    const CavityConfig cfg;
    const InputSignalSpec sig{SignalKind::Single, 0.0, 10.0};
    const auto s = decompose(sig, cfg, 5);
    std::ostringstream os;
    write_spectral_state(os, s, sig);
    const auto text = os.str();
    CHECK(text.find("alpha,parity,c_alpha\n") != std::string::npos);
    CHECK(text.find("\n5,even,0.44721359549995793\n") != std::string::npos);

    std::ostringstream dm;
    write_decay_map(dm, decay_time_map(cfg, DecoherenceParams::default_gamma(), 3));
    CHECK(dm.str().find("inf") != std::string::npos);

    PurityCurve c{{0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}};
    std::ostringstream pc;
    write_purity_curve(pc, c);
    std::istringstream back("# comment\n" + pc.str());
    const auto r = read_purity_curve(back);
    CHECK(r.times == c.times);
    CHECK(r.values == c.values);
}

TEST_CASE("heatmap rendering") {
    const auto map = ColorMap::sequential(0.0, 1.0);
    const std::vector<double> v{0.0, 1.0, 1.0, 0.0};
    const auto img = render_heatmap(v, 2, 2, map);
    const std::string header = "P6\n2 2\n255\n";
    REQUIRE(img.size() == header.size() + 12);
    CHECK(img.substr(0, header.size()) == header);
    auto px = [&](int i) {
        const auto* p = reinterpret_cast<const unsigned char*>(img.data() + header.size() + 3 * i);
        return Rgb{p[0], p[1], p[2]};
    };
    CHECK(px(0) == map.stops.front().color);
    CHECK(px(1) == map.stops.back().color);
    CHECK(px(2) == map.stops.back().color);
    CHECK(px(3) == map.stops.front().color);
    CHECK(render_heatmap(v, 2, 2, map) == img);

    const std::vector<double> flat(9, 3.0);
    const auto mid = render_heatmap(flat, 3, 3, ColorMap::sequential(3.0, 3.0));
    const auto centre = ColorMap::sequential(0.0, 1.0).color(0.5);
    const std::string flat_header = "P6\n3 3\n255\n";
    REQUIRE(mid.size() == flat_header.size() + 27);
    for (std::size_t i = flat_header.size(); i < mid.size(); i += 3)
        CHECK(Rgb{static_cast<std::uint8_t>(mid[i]), static_cast<std::uint8_t>(mid[i + 1]),
                  static_cast<std::uint8_t>(mid[i + 2])} == centre);

    const auto div = ColorMap::diverging(2.0);
    CHECK(div.color(0.0) == Rgb{255, 255, 255});
    CHECK(div.color(-2.0).b > div.color(-2.0).r);
    CHECK(div.color(5.0) == div.color(2.0));

    std::vector<double> bad{0.0, std::nan(""), 1.0, INFINITY};
    try {
        render_heatmap(bad, 2, 2, map);
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        CHECK(e.indices() == std::vector<std::size_t>{1, 3});
    }
    ColorMap broken = map;
    std::swap(broken.stops[1], broken.stops[2]);
    CHECK_THROWS(broken.validate());
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run writes a complete manifest and is independent of parallelism") {
    auto c = parse_config(
        "grid.nx = 81\ngrid.nt = 41\ngrid.quantity = both\n"
        "ensemble.count = 6\ngrid.tmax = 1\n"
        "densmat.n = 21\npurity.samples = 120\n"
        "sweep.x0_step = 5\n"
        "output.products = carpet, trajectories, densmat, purity, fit, sweep, decaymap\n");
    const auto d1 = scratch("run1");
    const auto d4 = scratch("run4");
    c.outputs.dir = d1;
    const auto m1 = run(c, 1);
    c.outputs.dir = d4;
    const auto m4 = run(c, 4);
    CHECK(m1.ok());
    REQUIRE(m1.files.size() == m4.files.size());
    for (std::size_t i = 0; i < m1.files.size(); ++i) {
        CHECK(m1.files[i].path == m4.files[i].path);
        // Config echo names the output directory; compare the rest.
        const auto a = slurp(d1 / m1.files[i].path);
        CHECK(m1.files[i].bytes == a.size());
        CHECK(m1.files[i].sha256 == sha256_hex(a));
        const auto strip = [](std::string s) {
            const auto k = s.find("dir = ");
            if (k != std::string::npos) s.erase(k, s.find('\n', k) - k);
            return s;
        };
        CHECK(strip(a) == strip(slurp(d4 / m4.files[i].path)));
    }
    CHECK(fs::exists(d1 / "manifest.csv"));
    CHECK(fs::exists(d1 / "carpet_density.ppm"));
    CHECK(fs::exists(d1 / "carpet_velocity.csv"));
    CHECK(fs::exists(d1 / "sweep.csv"));
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("defaults plus carpet give one csv and one image") {
    auto c = parse_config("grid.nx = 51\ngrid.nt = 21\noutput.products = carpet\n");
    const auto dir = scratch("carpet");
    c.outputs.dir = dir;
    const auto m = run(c, 2);
    CHECK(m.ok());
    REQUIRE(m.files.size() == 2);
    CHECK(m.files[0].path.extension() == ".csv");
    CHECK(m.files[1].path.extension() == ".ppm");
    fs::remove_all(dir);
}

TEST_CASE("sweep product over single x0 0..20 step 0.5 has 41 rows") {
    auto c = parse_config("purity.samples = 100\noutput.products = sweep\n");
    const auto dir = scratch("sweep");
    c.outputs.dir = dir;
    REQUIRE(run(c, 1).ok());
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        ++rows;
    }
    CHECK(rows == 41);
    fs::remove_all(dir);
}

TEST_CASE("product failures are collected") {
    auto c = parse_config("output.products = fit, decaymap\ndeco.gamma = 0\n");
    const auto dir = scratch("fail");
    c.outputs.dir = dir;
    const auto m = run(c, 1);
    CHECK_FALSE(m.ok());
    CHECK(m.failures.size() == 2);
    CHECK(fs::exists(dir / "manifest.csv"));
    fs::remove_all(dir);
}
