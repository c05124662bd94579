#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcarpet::io {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorStop {
    double position = 0.0;  ///< in [0, 1]
    Rgb color;
};

/// Piecewise-linear map from [min, max] to RGB. Values outside the anchors
/// clamp to the end colors.
struct ColorMap {
    enum class Kind { Diverging, Sequential };

    Kind kind = Kind::Sequential;
    double min = 0.0;
    double max = 1.0;
    std::vector<ColorStop> stops;

    /// Blue (low) through cyan, green, yellow to red (high).
    static ColorMap sequential(double min, double max);
    /// Blue for negative, white at zero, red for positive; anchored at
    /// [-abs_max, abs_max].
    static ColorMap diverging(double abs_max);

    void validate() const;
    Rgb color(double value) const;
};

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(std::vector<std::size_t> indices);
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

private:
    std::vector<std::size_t> indices_;
};

/// Binary P6 pixmap, one pixel per value, rows top to bottom. A degenerate
/// map (min == max) paints the mid color.
std::string render_heatmap(std::span<const double> values, std::size_t rows, std::size_t cols,
                           const ColorMap& map);

} // namespace qcarpet::io
