#include "qcarpet/io/image.hpp"

#include <algorithm>
#include <cmath>

namespace qcarpet::io {

ColorMap ColorMap::sequential(double min, double max) {
    ColorMap m;
    m.kind = Kind::Sequential;
    m.min = min;
    m.max = max;
    m.stops = {{0.0, {0, 0, 255}},
               {0.25, {0, 255, 255}},
               {0.5, {0, 255, 0}},
               {0.75, {255, 255, 0}},
               {1.0, {255, 0, 0}}};
    return m;
}

ColorMap ColorMap::diverging(double abs_max) {
    ColorMap m;
    m.kind = Kind::Diverging;
    m.min = -abs_max;
    m.max = abs_max;
    m.stops = {{0.0, {0, 0, 255}}, {0.5, {255, 255, 255}}, {1.0, {255, 0, 0}}};
    return m;
}

void ColorMap::validate() const {
    if (!std::isfinite(min) || !std::isfinite(max)) throw std::invalid_argument("color map anchors must be finite");
    if (max < min) throw std::invalid_argument("color map max below min");
    if (stops.size() < 2) throw std::invalid_argument("color map needs at least two stops");
    if (stops.front().position != 0.0 || stops.back().position != 1.0)
        throw std::invalid_argument("color map stops must span [0, 1]");
    for (std::size_t i = 1; i < stops.size(); ++i)
        if (!(stops[i].position >= stops[i - 1].position))
            throw std::invalid_argument("color map stops must be monotone");
}

Rgb ColorMap::color(double value) const {
    double pos = 0.5;
    if (max > min) pos = std::clamp((value - min) / (max - min), 0.0, 1.0);
    std::size_t hi = 1;
    while (hi + 1 < stops.size() && stops[hi].position < pos) ++hi;
    const ColorStop& a = stops[hi - 1];
    const ColorStop& b = stops[hi];
    const double width = b.position - a.position;
    const double f = width > 0.0 ? std::clamp((pos - a.position) / width, 0.0, 1.0) : 1.0;
    const auto mix = [f](std::uint8_t lo, std::uint8_t up) {
        return static_cast<std::uint8_t>(std::lround(lo + f * (static_cast<double>(up) - lo)));
    };
    return {mix(a.color.r, b.color.r), mix(a.color.g, b.color.g), mix(a.color.b, b.color.b)};
}

namespace {

std::string describe(const std::vector<std::size_t>& idx) {
    std::string s = "non-finite values at indices";
    const std::size_t shown = std::min<std::size_t>(idx.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : " ") + std::to_string(idx[i]);
    if (idx.size() > shown) s += ", ... (" + std::to_string(idx.size()) + " total)";
    return s;
}

} // namespace

NonFiniteError::NonFiniteError(std::vector<std::size_t> indices)
    : std::runtime_error(describe(indices)), indices_(std::move(indices)) {}

std::string render_heatmap(std::span<const double> values, std::size_t rows, std::size_t cols,
                           const ColorMap& map) {
    map.validate();
    if (rows * cols != values.size()) throw std::invalid_argument("heatmap shape does not match value count");
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) bad.push_back(i);
    if (!bad.empty()) throw NonFiniteError(std::move(bad));

    std::string out = "P6\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + 3 * values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Rgb c = map.color(values[i]);
        out[header + 3 * i] = static_cast<char>(c.r);
        out[header + 3 * i + 1] = static_cast<char>(c.g);
        out[header + 3 * i + 2] = static_cast<char>(c.b);
    }
    return out;
}

} // namespace qcarpet::io
