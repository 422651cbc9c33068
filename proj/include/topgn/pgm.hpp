#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "topgn/grid.hpp"

namespace topgn {

/// Reads a P5 grid written by write_pgm; returns raw byte values.
inline Grid2D<std::uint8_t> read_pgm(const std::string& path, double cell_size = 0.05)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read PGM: " + path);

    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error(path + ": not a P5 PGM");
    const auto skip_comments = [&in] {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            in >> std::ws;
        }
    };
    int width = 0, height = 0, maxval = 0;
    skip_comments();
    in >> width;
    skip_comments();
    in >> height;
    skip_comments();
    in >> maxval;
    in.get();
    if (width != height || width <= 0 || maxval != 255)
        throw std::runtime_error(path + ": expected square 8-bit PGM");

    Grid2D<std::uint8_t> grid(GridSpec{width, cell_size});
    in.read(reinterpret_cast<char*>(grid.values().data()),
            static_cast<std::streamsize>(grid.values().size()));
    if (!in) throw std::runtime_error(path + ": truncated pixel data");
    return grid;
}

/// Binary PGM (P5) export. Values are linearly scaled so the grid maximum
/// maps to 255; the scale factor is recorded in the comment line.
template <typename T>
inline void write_pgm(const std::string& path, const Grid2D<T>& grid)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write PGM: " + path);

    double max_v = 0.0;
    for (const T& v : grid.values()) max_v = std::max(max_v, static_cast<double>(v));
    const double scale = max_v > 0.0 ? 255.0 / max_v : 1.0;

    char header[96];
    std::snprintf(header, sizeof(header), "P5\n# scale=%.9g\n%d %d\n255\n", scale, grid.side(),
                  grid.side());
    out << header;
    for (const T& v : grid.values()) {
        const double scaled = std::round(static_cast<double>(v) * scale);
        out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0))));
    }
}

} // namespace topgn
