#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "decum/io.hpp"
#include "decum/optimizer.hpp"

namespace decum {

namespace detail {

inline void push_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

inline void push_chunk(std::vector<unsigned char>& out, const char type[4],
                       const std::vector<unsigned char>& data) {
    push_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = ::crc32(0, out.data() + crc_start,
                              static_cast<uInt>(out.size() - crc_start));
    push_u32(out, static_cast<std::uint32_t>(crc));
}

} // namespace detail

// Minimal RGB8 PNG encoder (zlib-deflated, filter 0 scanlines).
inline void write_png(const std::string& path, int width, int height,
                      const std::vector<unsigned char>& rgb) {
    require(width > 0 && height > 0, "image must be non-empty");
    require(rgb.size() == static_cast<std::size_t>(width) * height * 3,
            "rgb buffer size mismatch");
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0); // filter: none
        const unsigned char* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(width) * 3);
    }
    uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> deflated(bound);
    if (::compress2(deflated.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("png: zlib compression failed");
    deflated.resize(bound);

    std::vector<unsigned char> png{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<unsigned char> ihdr;
    detail::push_u32(ihdr, static_cast<std::uint32_t>(width));
    detail::push_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // colour type: truecolour
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    detail::push_chunk(png, "IHDR", ihdr);
    detail::push_chunk(png, "IDAT", deflated);
    detail::push_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open png output: " + path);
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
}

struct rgb {
    unsigned char r, g, b;
};

// Fixed palette, one colour per decision label.
inline rgb map_color(const std::string& label) {
    if (label == "drawdown") return {200, 200, 200};
    if (label == "GSA") return {27, 158, 119};
    if (label == "ULA") return {217, 95, 2};
    if (label == "LIA") return {117, 112, 179};
    if (label == "IIA") return {231, 41, 138};
    return {255, 255, 255}; // infeasible
}

// Nearest-neighbour cell rendering: psi increases left to right, b increases
// bottom to top (tightest appetites sit in the top-left corner).
inline void render_decision_map(const std::string& path, const decision_map& m,
                                int cell_px = 24) {
    const int nb = static_cast<int>(m.bs.size());
    const int np = static_cast<int>(m.psis.size());
    require(nb > 0 && np > 0, "decision map is empty");
    const int width = np * cell_px;
    const int height = nb * cell_px;
    std::vector<unsigned char> img(static_cast<std::size_t>(width) * height * 3);
    for (int ib = 0; ib < nb; ++ib) {
        for (int ip = 0; ip < np; ++ip) {
            const optimum& o = m.cells[m.idx(static_cast<std::size_t>(ib),
                                             static_cast<std::size_t>(ip))];
            const rgb c = map_color(map_label(o));
            const int y0 = (nb - 1 - ib) * cell_px;
            const int x0 = ip * cell_px;
            for (int y = y0; y < y0 + cell_px; ++y) {
                for (int x = x0; x < x0 + cell_px; ++x) {
                    const std::size_t k =
                        (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)) * 3;
                    img[k] = c.r;
                    img[k + 1] = c.g;
                    img[k + 2] = c.b;
                }
            }
        }
    }
    write_png(path, width, height, img);
}

} // namespace decum
