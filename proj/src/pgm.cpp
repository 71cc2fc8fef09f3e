#include "visionts/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "visionts/errors.hpp"

namespace visionts {

std::vector<std::uint8_t> encode_pgm(const Grid<float>& image) {
    if (image.empty()) throw ShapeError("cannot encode an empty image");
    const std::string header =
        "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + image.size());
    const auto [lo, hi] = std::minmax_element(image.values().begin(), image.values().end());
    const double min = *lo, max = *hi;
    for (float v : image.values()) {
        if (!(max > min)) {
            out.push_back(128);
            continue;
        }
        const double scaled = (static_cast<double>(v) - min) / (max - min) * 255.0;
        out.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L)));
    }
    return out;
}

void write_pgm(const std::string& path, const Grid<float>& image) {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace visionts
